pub mod budget;
pub mod error;
pub mod graph;
pub mod torus;
pub mod transforms;
pub mod covers;
pub mod onemodr;
pub mod oddcounter;
pub mod cubeedge;
pub mod figure;
pub mod cli;
pub mod packsearch;
