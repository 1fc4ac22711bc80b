//! Registry of crypto providers.
//!
//! A provider names the implementation behind the primitives. The build ships
//! one, backed by the pure-Rust RustCrypto crates.

use crate::labels::Algorithm;

pub const DEFAULT: &str = "rustcrypto";

#[derive(Debug)]
pub struct Provider {
    pub name: &'static str,
    pub algorithms: &'static [Algorithm],
}

impl Provider {
    pub fn supports(&self, algorithm: Algorithm) -> bool {
        self.algorithms.contains(&algorithm)
    }
}

static REGISTRY: [Provider; 1] = [Provider {
    name: DEFAULT,
    algorithms: &Algorithm::ALL,
}];

pub fn registry() -> &'static [Provider] {
    &REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static Provider> {
    let name = name.trim();
    REGISTRY.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}
