//! Logical forms: the predicate inventory, typed expression trees, instances
//! and the strict (boolean) executor.

mod expr;
mod instance;
mod predicate;
pub mod sexpr;
mod strict;

pub use expr::{asserts_something, check_form, validate, Expr, LogicalForm, TypeError};
pub use instance::{infer_role_anchors, tokenize, AnchorRole, Instance, LabelSet, Span};
pub use predicate::{ModuleClass, Predicate, Signature, Type};
pub use strict::{exec_strict, phrase_occurrences, query_tokens};
