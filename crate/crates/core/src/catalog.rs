//! Sample manifolds shipped with the library, one per splitting case plus a
//! leaf-intersection sample and a Sol-like double.

use crate::manifold::SplitCase;

pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
    /// Case of edge `e1`, or `None` when the edge cannot be classified.
    pub case: Option<SplitCase>,
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "d1", text: include_str!("../catalog/d1.gm"), case: Some(SplitCase::D1) },
    Entry { name: "d2", text: include_str!("../catalog/d2.gm"), case: Some(SplitCase::D2) },
    Entry { name: "d3", text: include_str!("../catalog/d3.gm"), case: Some(SplitCase::D3) },
    Entry { name: "d4", text: include_str!("../catalog/d4.gm"), case: Some(SplitCase::D4) },
    Entry { name: "nd1", text: include_str!("../catalog/nd1.gm"), case: Some(SplitCase::ND1) },
    Entry { name: "nd2", text: include_str!("../catalog/nd2.gm"), case: Some(SplitCase::ND2) },
    Entry { name: "leaves", text: include_str!("../catalog/leaves.gm"), case: Some(SplitCase::D3) },
    Entry { name: "sol", text: include_str!("../catalog/sol.gm"), case: None },
];

pub fn get(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}
