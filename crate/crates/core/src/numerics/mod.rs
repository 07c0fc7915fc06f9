//! Dense tensor math, reverse-mode differentiation, gradient checking and
//! the AdamW optimizer.

mod adamw;
mod graph;
mod gradcheck;
mod kernels;
mod tensor;

pub use adamw::{AdamW, AdamWConfig, OptimizerState};
pub use graph::Axis;
pub use graph::{Gradients, Graph, NodeId};
pub use gradcheck::{grad_check, DEFAULT_STEP};
pub use kernels::{matmul, matmul_nt, matmul_tn};
pub use tensor::Tensor;
