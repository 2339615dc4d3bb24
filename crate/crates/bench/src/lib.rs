//! Fixture programs shared by the benchmarks in `benches/`.

use ocomp_core::syntax::{parse_program, Program};

const SOURCES: [(&str, &str); 5] = [
    ("tight", include_str!("../../../data/tight.lp")),
    ("non_tight", include_str!("../../../data/non_tight.lp")),
    ("locally_tight", include_str!("../../../data/locally_tight.lp")),
    ("transitive", include_str!("../../../data/transitive.lp")),
    ("backward", include_str!("../../../data/backward.lp")),
];

pub fn fixtures() -> Vec<(&'static str, Program)> {
    SOURCES
        .iter()
        .map(|&(name, text)| (name, parse_program(text).expect("fixture parses")))
        .collect()
}

/// A chain `p0 :- p1. p1 :- p2. ...` closed into a cycle, with one unary
/// predicate per link, to see how the translations scale with program size.
pub fn cycle(links: usize) -> Program {
    let text: String = (0..links)
        .map(|k| format!("p{k}(X) :- p{}(X), not q(X).\n", (k + 1) % links))
        .collect();
    parse_program(&format!("{text}q(1).\n")).expect("generated program parses")
}
