//! The term language: typed values, terms, bindings, evaluation and queues.

mod binding;
mod queue;
mod term;
mod value;

pub use binding::{compose, substitute, Binding};
pub use queue::Queue;
pub use term::{ops, prod, Env, EvalError, Func, Term, Valuation};
pub use value::{ChannelId, NodeId, Rational, RowSource, TypeTag, Value};
