pub mod syntax;
pub mod typegraph;
pub mod unify;
pub mod infer;
pub mod runtime;
pub mod stdlib;
pub mod session;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/unification.md")]
    struct Unification;
    #[doc = include_str!("../../../book/src/inference.md")]
    struct Inference;
    #[doc = include_str!("../../../book/src/runtime.md")]
    struct Runtime;
    #[doc = include_str!("../../../book/src/contracts.md")]
    struct Contracts;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
