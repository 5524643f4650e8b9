//! Canonical labeling by color refinement plus individualization.
//!
//! Modes are registered as [`Canonizer`] trait objects and looked up by name:
//! `digraph` and `graph` are the cheap circulant algorithms (they individualize
//! vertex 0 only and are canonical for vertex-transitive inputs), `full` tries
//! every individualization and is canonical on all inputs, `naive` is the
//! seeded refinement-individualization loop. `wl2-rep` lives in [`crate::wl2`].

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{relabel, Digraph, Labeling, Permutation};
use crate::refinement::{
    color_refinement_with, default_engine, initial_coloring, Coloring, RefinementEngine,
};
use crate::wl2::CayleyRepresentation;

/// Why a canonizer gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GiveUp {
    /// The stable coloring after individualization is not discrete.
    NotDiscrete,
    /// No color class of size exactly two.
    NoPairClass,
    /// The combined labels are not pairwise distinct.
    DuplicateLabels,
    /// No individualization produced a labeling.
    NoCandidate,
    /// No 2-WL color class is an `n`-cycle.
    NoCycleClass,
    /// The recovered cyclic permutation is not an automorphism.
    NotAutomorphism,
}

impl GiveUp {
    pub fn code(self) -> &'static str {
        match self {
            GiveUp::NotDiscrete => "not-discrete",
            GiveUp::NoPairClass => "no-pair-class",
            GiveUp::DuplicateLabels => "duplicate-labels",
            GiveUp::NoCandidate => "no-candidate",
            GiveUp::NoCycleClass => "no-cycle-class",
            GiveUp::NotAutomorphism => "not-automorphism",
        }
    }
}

impl fmt::Display for GiveUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Outcome of a canonizer. On success `form == relabel(input, labeling)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonResult {
    Success { labeling: Labeling, form: Digraph },
    GiveUp(GiveUp),
}

impl CanonResult {
    fn from_labeling(x: &Digraph, labeling: Labeling) -> Self {
        let form = relabel(x, &labeling).expect("labeling has the input's order");
        CanonResult::Success { labeling, form }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, CanonResult::Success { .. })
    }

    pub fn form(&self) -> Option<&Digraph> {
        match self {
            CanonResult::Success { form, .. } => Some(form),
            CanonResult::GiveUp(_) => None,
        }
    }

    pub fn labeling(&self) -> Option<&Labeling> {
        match self {
            CanonResult::Success { labeling, .. } => Some(labeling),
            CanonResult::GiveUp(_) => None,
        }
    }

    pub fn give_up_reason(&self) -> Option<GiveUp> {
        match self {
            CanonResult::Success { .. } => None,
            CanonResult::GiveUp(r) => Some(*r),
        }
    }
}

/// A canonical labeling strategy.
pub trait Canonizer: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn canonize(&self, x: &Digraph) -> Result<CanonResult>;
}

/// Knobs shared by the registered canonizers.
#[derive(Debug, Clone, Copy)]
pub struct CanonOptions {
    /// Tie-break seed for `naive`.
    pub seed: u64,
    pub engine: &'static dyn RefinementEngine,
}

impl Default for CanonOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            engine: default_engine(),
        }
    }
}

pub const CANONIZER_NAMES: [&str; 5] = ["digraph", "graph", "full", "naive", "wl2-rep"];

/// Builds the canonizer registered under `name`.
pub fn canonizer(name: &str, opts: CanonOptions) -> Option<Box<dyn Canonizer>> {
    let engine = opts.engine;
    Some(match name {
        "digraph" => Box::new(DigraphCanonizer { engine }),
        "graph" => Box::new(GraphCanonizer { engine }),
        "full" => Box::new(FullCanonizer { engine }),
        "naive" => Box::new(NaiveCanonizer {
            engine,
            seed: opts.seed,
        }),
        "wl2-rep" => Box::new(CayleyRepresentation),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DigraphCanonizer {
    pub engine: &'static dyn RefinementEngine,
}

#[derive(Debug, Clone, Copy)]
pub struct GraphCanonizer {
    pub engine: &'static dyn RefinementEngine,
}

#[derive(Debug, Clone, Copy)]
pub struct FullCanonizer {
    pub engine: &'static dyn RefinementEngine,
}

#[derive(Debug, Clone, Copy)]
pub struct NaiveCanonizer {
    pub engine: &'static dyn RefinementEngine,
    pub seed: u64,
}

impl Canonizer for DigraphCanonizer {
    fn name(&self) -> &'static str {
        "digraph"
    }

    fn canonize(&self, x: &Digraph) -> Result<CanonResult> {
        Ok(canonize_digraph_with(self.engine, x))
    }
}

impl Canonizer for GraphCanonizer {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn canonize(&self, x: &Digraph) -> Result<CanonResult> {
        canonize_graph_with(self.engine, x, PairChoice::Smaller)
    }
}

impl Canonizer for FullCanonizer {
    fn name(&self) -> &'static str {
        "full"
    }

    fn canonize(&self, x: &Digraph) -> Result<CanonResult> {
        Ok(canonize_full_with(self.engine, x))
    }
}

impl Canonizer for NaiveCanonizer {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn canonize(&self, x: &Digraph) -> Result<CanonResult> {
        naive_canonize_with(self.engine, x, self.seed)
    }
}

fn refine(engine: &dyn RefinementEngine, x: &Digraph, individualized: &[usize]) -> Coloring {
    if x.n() == 0 {
        return color_refinement_with(engine, x, &[]).expect("empty digraph");
    }
    color_refinement_with(engine, x, individualized).expect("vertex in range")
}

fn labeling_from_discrete(c: &Coloring) -> Labeling {
    Permutation::new(c.colors().iter().map(|&v| v as usize).collect())
        .expect("discrete coloring is a bijection")
}

/// Ranks vertices by `(C(x), C'(x))`; `None` if two labels coincide.
fn labeling_from_pairs(c: &Coloring, c2: &Coloring) -> Option<Labeling> {
    let n = c.n();
    let key = |v: usize| (c.color(v), c2.color(v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| key(v));
    if order.windows(2).any(|w| key(w[0]) == key(w[1])) {
        return None;
    }
    let mut images = vec![0; n];
    for (rank, &v) in order.iter().enumerate() {
        images[v] = rank;
    }
    Some(Permutation::new(images).expect("ranks form a bijection"))
}

/// Individualize vertex 0, refine, and accept only a discrete coloring.
pub fn canonize_digraph(x: &Digraph) -> CanonResult {
    canonize_digraph_with(default_engine(), x)
}

pub fn canonize_digraph_with(engine: &dyn RefinementEngine, x: &Digraph) -> CanonResult {
    let c = refine(engine, x, &[0]);
    if c.is_discrete() {
        CanonResult::from_labeling(x, labeling_from_discrete(&c))
    } else {
        CanonResult::GiveUp(GiveUp::NotDiscrete)
    }
}

/// Which vertex of the size-two class gets individualized in the graph
/// algorithm. Both give the same form on circulants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairChoice {
    Smaller,
    Larger,
}

/// The six-step graph algorithm: refine `X_0`, individualize a vertex `u` of
/// the least color class with exactly two vertices, refine `X_u`, and label by
/// `(C(x), C'(x))`. A discrete `C` is accepted directly.
pub fn canonize_graph(x: &Digraph) -> Result<CanonResult> {
    canonize_graph_with(default_engine(), x, PairChoice::Smaller)
}

pub fn canonize_graph_with(
    engine: &dyn RefinementEngine,
    x: &Digraph,
    choice: PairChoice,
) -> Result<CanonResult> {
    if !x.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let c = refine(engine, x, &[0]);
    if c.is_discrete() {
        return Ok(CanonResult::from_labeling(x, labeling_from_discrete(&c)));
    }
    Ok(match graph_labels(engine, x, &c, choice) {
        Ok(l) => CanonResult::from_labeling(x, l),
        Err(r) => CanonResult::GiveUp(r),
    })
}

fn graph_labels(
    engine: &dyn RefinementEngine,
    x: &Digraph,
    c: &Coloring,
    choice: PairChoice,
) -> std::result::Result<Labeling, GiveUp> {
    let classes = c.classes();
    let pair = classes
        .iter()
        .find(|cl| cl.len() == 2)
        .ok_or(GiveUp::NoPairClass)?;
    let u = match choice {
        PairChoice::Smaller => pair[0],
        PairChoice::Larger => pair[1],
    };
    let c2 = refine(engine, x, &[u]);
    labeling_from_pairs(c, &c2).ok_or(GiveUp::DuplicateLabels)
}

/// Tries every start vertex (and for graphs both vertices of the pair class)
/// and keeps the labeling whose form is least in row-major order.
pub fn canonize_full(x: &Digraph) -> CanonResult {
    canonize_full_with(default_engine(), x)
}

pub fn canonize_full_with(engine: &dyn RefinementEngine, x: &Digraph) -> CanonResult {
    let symmetric = x.is_symmetric();
    let mut best: Option<(Digraph, Labeling)> = None;
    let mut offer = |l: Labeling| {
        let form = relabel(x, &l).expect("labeling has the input's order");
        let better = match &best {
            None => true,
            Some((f, _)) => form.cmp_row_major(f) == Ordering::Less,
        };
        if better {
            best = Some((form, l));
        }
    };
    for v in 0..x.n() {
        let c = refine(engine, x, &[v]);
        if c.is_discrete() {
            offer(labeling_from_discrete(&c));
        } else if symmetric {
            for choice in [PairChoice::Smaller, PairChoice::Larger] {
                if let Ok(l) = graph_labels(engine, x, &c, choice) {
                    offer(l);
                }
            }
        }
    }
    match best {
        Some((form, labeling)) => CanonResult::Success { labeling, form },
        None if x.n() == 0 => CanonResult::from_labeling(x, Permutation::identity(0)),
        None => CanonResult::GiveUp(GiveUp::NoCandidate),
    }
}

/// Refine; while not discrete, individualize a seeded choice from the least
/// non-singleton class and refine again. Always returns a labeling.
pub fn naive_canonize(x: &Digraph, seed: u64) -> Result<CanonResult> {
    naive_canonize_with(default_engine(), x, seed)
}

pub fn naive_canonize_with(
    engine: &dyn RefinementEngine,
    x: &Digraph,
    seed: u64,
) -> Result<CanonResult> {
    if !x.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = engine.refine(x, initial_coloring(x, &[])?);
    while !c.is_discrete() {
        let classes = c.classes();
        let class = classes
            .iter()
            .find(|cl| cl.len() > 1)
            .expect("not discrete");
        let v = class[rng.gen_range(0..class.len())];
        c = engine.refine(x, c.individualize(v));
    }
    Ok(CanonResult::from_labeling(x, labeling_from_discrete(&c)))
}
