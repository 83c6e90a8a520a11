pub mod alloc;
pub mod channel;
pub mod config;
pub mod error;
pub mod precoder;
pub mod ratecalc;
pub mod sim;
pub mod specfun;
