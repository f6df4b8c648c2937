//! Doc-test harness for the book: every fenced Rust block in the chapters
//! under `book/src/` runs as a doc test here, keeping the guide and the
//! library in sync.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/flavors.md")]
pub mod flavors {}

#[doc = include_str!("../../../book/src/decomposition.md")]
pub mod decomposition {}

#[doc = include_str!("../../../book/src/structure.md")]
pub mod structure {}

#[doc = include_str!("../../../book/src/qiep.md")]
pub mod qiep {}

#[doc = include_str!("../../../book/src/embedding.md")]
pub mod embedding {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
