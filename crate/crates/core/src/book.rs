#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/matrices.md")]
mod matrices {}
#[doc = include_str!("../../../book/src/functions.md")]
mod functions {}
#[doc = include_str!("../../../book/src/compressions.md")]
mod compressions {}
#[doc = include_str!("../../../book/src/dilations.md")]
mod dilations {}
#[doc = include_str!("../../../book/src/checks.md")]
mod checks {}
#[doc = include_str!("../../../book/src/tolerances.md")]
mod tolerances {}
#[doc = include_str!("../../../book/src/fuzzing.md")]
mod fuzzing {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
