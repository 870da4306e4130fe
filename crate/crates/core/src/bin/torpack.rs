fn main() {
    std::process::exit(torus_packing::cli::run(std::env::args_os()));
}
