pub mod channel;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod sdp;
pub mod lab;
pub mod ucqc;
