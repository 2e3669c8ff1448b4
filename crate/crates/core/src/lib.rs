//! Modelling and explicit-state checking of distributed processes built from
//! message-passing sequential processes.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dsl;
pub mod explorer;
pub mod matmul;
pub mod process;
pub mod semantics;
pub mod terms;
