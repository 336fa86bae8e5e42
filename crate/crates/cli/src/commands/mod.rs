//! One module per subcommand.

pub mod bench;
pub mod consistency;
pub mod entail;
pub mod inject;
pub mod instantiate;
pub mod rank;
pub mod train;
