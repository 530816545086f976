//! Bundled example groups.

use crate::error::{Error, Result};
use crate::group::{GroupSpec, GroupTable};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        /// `(name, json)` for every bundled group file.
        pub const FILES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../corpus/", $name, ".json")))),*
        ];
    };
}

bundled!(
    "c2", "c3", "c4", "s3", "s4", "a4", "d8", "sl23", "a5", "s5", "a6", "s6", "a7", "s7", "a5xa5",
    "s3xs3", "a4xa4", "s5xs3", "psl28", "pgammal28",
);

pub fn spec(name: &str) -> Result<GroupSpec> {
    let (_, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidSpec(format!("no bundled group named {name}")))?;
    GroupSpec::from_json(text)
}

/// Generates a bundled group; panics only if the bundled data is broken.
pub fn load(name: &str) -> GroupTable {
    let g = GroupTable::generate(&spec(name).expect("bundled spec parses"))
        .expect("bundled group within cap");
    if name == "pgammal28" {
        assert_eq!(g.order(), 1512, "bundled PGammaL(2,8) must have order 1512");
    }
    g
}
