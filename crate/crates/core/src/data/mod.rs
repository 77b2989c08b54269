//! Diagram I/O, sublevel-set persistence and synthetic datasets.

pub mod io;
pub mod sublevel;
pub mod synth;

pub use io::{parse_diagram, serialize_diagram, Format, IoError};
pub use sublevel::{sublevel_pd0, SampledFunction};
pub use synth::{gen_diagram_cloud, gen_two_class_functions, random_diagram};

use crate::diagram::PersistenceDiagram;

/// Supervision target of a dataset item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Real(f64),
    Class(usize),
}

/// Diagrams with targets, plus the seed used for train/test splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub items: Vec<(PersistenceDiagram, Target)>,
    pub split_seed: u64,
}

impl LabeledDataset {
    pub fn diagrams(&self) -> Vec<&PersistenceDiagram> {
        self.items.iter().map(|(d, _)| d).collect()
    }

    /// Class labels, or `None` if any target is real-valued.
    pub fn classes(&self) -> Option<Vec<usize>> {
        self.items
            .iter()
            .map(|(_, t)| match t {
                Target::Class(c) => Some(*c),
                Target::Real(_) => None,
            })
            .collect()
    }

    /// Real targets, with class labels cast to `f64`.
    pub fn reals(&self) -> Vec<f64> {
        self.items
            .iter()
            .map(|(_, t)| match t {
                Target::Real(x) => *x,
                Target::Class(c) => *c as f64,
            })
            .collect()
    }
}
