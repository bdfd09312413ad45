//! Reduction of triangular systems over the base group to finitely many
//! systems over the free group on its generators, and the solution tree
//! assembled from them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::equations::{Assignment, EqSystem, Evaluation, TriangularSystem};
use crate::error::{Error, Result};
use crate::presentation::{Exactness, Presentation};
use crate::word::{ball, Symbol, Word};

/// How group elements are lifted to words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepScheme {
    /// Free base: the reduced word itself.
    Geodesic,
    /// Small-cancellation base: the Dehn-reduced word.
    Dehn,
}

impl RepScheme {
    pub fn for_group(g: &Presentation) -> Self {
        if g.is_free() {
            RepScheme::Geodesic
        } else {
            RepScheme::Dehn
        }
    }
}

/// A representative word equal to `g` in the group.
pub fn theta(group: &Presentation, g: &Word) -> Word {
    match RepScheme::for_group(group) {
        RepScheme::Geodesic => g.clone(),
        RepScheme::Dehn => group.dehn_reduce(g),
    }
}

/// The length constant `q * 2^(5050 (delta+1)^6 (2|A|)^(2 delta))`, kept as
/// the factor `q` and the exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoreticalL {
    pub q: u64,
    pub exponent: BigUint,
}

impl TheoreticalL {
    pub fn new(q: usize, delta: u32, alphabet_size: usize) -> Self {
        let d1 = BigUint::from(delta + 1);
        let a2 = BigUint::from(2 * alphabet_size as u64);
        let exponent = BigUint::from(5050u32) * d1.pow(6) * a2.pow(2 * delta);
        TheoreticalL {
            q: q as u64,
            exponent,
        }
    }

    /// Number of decimal digits of `L`, estimated from the exponent.
    pub fn approx_decimal_digits(&self) -> f64 {
        let e: f64 = self.exponent.to_string().parse().unwrap_or(f64::INFINITY);
        e * std::f64::consts::LOG10_2 + (self.q.max(1) as f64).log10()
    }
}

impl fmt::Display for TheoreticalL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * 2^{}", self.q, self.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalConfig {
    /// Every constant `c_k` has length strictly below this.
    pub bound: usize,
    /// Hyperbolicity constant used only for reporting the theoretical bound.
    pub delta: u32,
}

impl Default for CanonicalConfig {
    fn default() -> Self {
        CanonicalConfig { bound: 2, delta: 0 }
    }
}

impl CanonicalConfig {
    pub fn theoretical_l(&self, ts: &TriangularSystem) -> TheoreticalL {
        let q = ts.triangles.len() + ts.constants.len();
        TheoreticalL::new(q, self.delta, ts.group.generators().len())
    }
}

/// One system over the free group together with the word map back to the
/// triangular variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedInstance {
    pub system: EqSystem,
    /// Triangular variable to word over the instance variables and the
    /// base generators.
    pub rho: Assignment,
    /// `[c_1, c_2, c_3]` for every triangle.
    pub constants: Vec<[Word; 3]>,
}

fn x_name(j: usize, k: usize) -> String {
    format!("x{j}_{k}")
}

impl ReducedInstance {
    /// Builds the instance for a choice of constants, rejecting any triple
    /// whose product is nontrivial in the base group.
    pub fn new(ts: &TriangularSystem, constants: Vec<[Word; 3]>) -> Result<Self> {
        let group = &ts.group;
        if constants.len() != ts.triangles.len() {
            return Err(Error::Invalid(format!(
                "{} constant triples given for {} triangles",
                constants.len(),
                ts.triangles.len()
            )));
        }
        for (j, c) in constants.iter().enumerate() {
            if !group.wp(&Word::product(c.iter()))? {
                return Err(Error::Invalid(format!(
                    "constants of triangle {} do not multiply to 1",
                    j + 1
                )));
            }
        }
        let gens = group.generators();
        let fresh = |base: String| {
            let mut s = base;
            while gens.iter().any(|g| g.as_str() == s) {
                s.push('_');
            }
            Symbol::new(&s)
        };
        let mut variables: Vec<Symbol> = Vec::new();
        for j in 1..=ts.triangles.len() {
            for k in 1..=3 {
                variables.push(fresh(x_name(j, k)));
            }
        }
        let xvar = |j: usize, k: usize| Word::symbol(&variables[3 * j + (k % 3)]);
        // x_k c_k x_{k+1}^-1 for 0-based triangle j and 0-based corner k
        let side = |j: usize, k: usize| {
            Word::product([&xvar(j, k), &constants[j][k], &xvar(j, k + 1).inverse()])
        };

        let mut occurrences: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (j, tri) in ts.triangles.iter().enumerate() {
            for (k, &s) in tri.iter().enumerate() {
                occurrences.entry(s).or_default().push((j, k));
            }
        }
        let mut pinned: BTreeMap<usize, Word> = BTreeMap::new();
        for (s, a) in &ts.constants {
            pinned.entry(*s).or_insert_with(|| theta(group, a));
        }

        let mut equations = Vec::new();
        for occ in occurrences.values() {
            let first = side(occ[0].0, occ[0].1);
            for &(j, k) in &occ[1..] {
                equations.push(first.mul(&side(j, k).inverse()));
            }
        }
        for (s, a) in &pinned {
            for &(j, k) in occurrences.get(s).map(Vec::as_slice).unwrap_or(&[]) {
                equations.push(side(j, k).mul(&a.inverse()));
            }
        }
        let mut rho = Assignment::new();
        let mut extra: Vec<Symbol> = Vec::new();
        for (s, z) in ts.variables.iter().enumerate() {
            let img = if let Some(a) = pinned.get(&s) {
                a.clone()
            } else if let Some(occ) = occurrences.get(&s) {
                side(occ[0].0, occ[0].1)
            } else {
                let y = fresh(format!("x0_{}", s + 1));
                extra.push(y.clone());
                Word::symbol(&y)
            };
            rho.insert(z.clone(), img);
        }
        variables.extend(extra);
        let free = Arc::new(Presentation::free(
            &format!("F_{}", group.name()),
            gens.to_vec(),
        )?);
        let system = EqSystem::new("instance", free, variables, equations)?;
        Ok(ReducedInstance {
            system,
            rho,
            constants,
        })
    }
}

/// All instances with constants of length below `cfg.bound`. Systems whose
/// constant equations contradict each other produce no instance.
pub fn generate_instances(
    ts: &TriangularSystem,
    cfg: &CanonicalConfig,
) -> Result<Vec<ReducedInstance>> {
    let group = &ts.group;
    if cfg.bound == 0 {
        return Ok(Vec::new());
    }
    let mut first: BTreeMap<usize, &Word> = BTreeMap::new();
    for (s, a) in &ts.constants {
        match first.get(s) {
            Some(b) if !group.wp(&a.mul(&b.inverse()))? => return Ok(Vec::new()),
            Some(_) => {}
            None => {
                first.insert(*s, a);
            }
        }
    }
    let words = ball(group.generators(), cfg.bound - 1);
    let mut triples: Vec<[Word; 3]> = Vec::new();
    for c1 in &words {
        for c2 in &words {
            for c3 in &words {
                if group.wp(&Word::product([c1, c2, c3]))? {
                    triples.push([c1.clone(), c2.clone(), c3.clone()]);
                }
            }
        }
    }
    let mut choices: Vec<Vec<[Word; 3]>> = vec![Vec::new()];
    for _ in &ts.triangles {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                triples.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    choices
        .into_par_iter()
        .map(|c| ReducedInstance::new(ts, c))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pullback {
    /// The pulled-back assignment of the original variables.
    Ok(Assignment),
    /// Equation index of the original system that failed.
    Violation(usize),
}

/// Checks that a free-group solution of an instance yields, through `rho`,
/// a solution of the triangular system and of the original system.
pub fn check_pullback(
    inst: &ReducedInstance,
    ts: &TriangularSystem,
    original: &EqSystem,
    phi: &Assignment,
) -> Result<Pullback> {
    if let Evaluation::Violated(i) = inst.system.evaluate(phi, &*inst.system.group)? {
        return Err(Error::NotASolution(i));
    }
    let psi: Assignment = inst
        .rho
        .iter()
        .map(|(z, w)| (z.clone(), w.substitute_map(phi)))
        .collect();
    let tri = ts.as_system("triangular")?;
    if let Evaluation::Violated(i) = tri.evaluate(&psi, &*ts.group)? {
        return Err(Error::Invalid(format!(
            "pulled-back assignment violates triangular equation {i}"
        )));
    }
    let restricted = ts.restrict_solution(&psi);
    Ok(match original.evaluate(&restricted, &*original.group)? {
        Evaluation::Satisfied => Pullback::Ok(restricted),
        Evaluation::Violated(i) => Pullback::Violation(i),
    })
}

/// Solutions of a system over the free group, as a leaf of the tree: every
/// solution is the given assignment of the constrained variables extended by
/// arbitrary values of `free_variables`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafSolution {
    pub solutions: Vec<Assignment>,
    pub free_variables: Vec<Symbol>,
    pub exactness: Exactness,
}

/// The pluggable solver for systems over the free group.
pub trait LeafSolver: Sync {
    fn solve(&self, system: &EqSystem) -> Result<LeafSolution>;
}

/// Backtracking over all images of length at most `radius`, keeping at most
/// `limit` solutions.
#[derive(Clone, Debug)]
pub struct BruteForceSolver {
    pub radius: usize,
    pub limit: Option<usize>,
}

impl Default for BruteForceSolver {
    fn default() -> Self {
        BruteForceSolver {
            radius: 1,
            limit: Some(256),
        }
    }
}

impl LeafSolver for BruteForceSolver {
    fn solve(&self, system: &EqSystem) -> Result<LeafSolution> {
        let (constrained, free): (Vec<Symbol>, Vec<Symbol>) = system
            .variables
            .iter()
            .cloned()
            .partition(|v| system.equations.iter().any(|e| e.contains_symbol(v)));
        let sub = EqSystem::new(
            &system.name,
            system.group.clone(),
            constrained,
            system.equations.clone(),
        )?;
        let solutions = sub.hom_search(&*system.group, self.radius, self.limit)?;
        Ok(LeafSolution {
            solutions,
            free_variables: free,
            exactness: Exactness::BoundLimited,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub instance: ReducedInstance,
    /// Solver failures are kept per branch rather than aborting the tree.
    pub leaf: std::result::Result<LeafSolution, Error>,
}

/// Root system, its triangulation, and one branch per instance.
#[derive(Clone, Debug)]
pub struct HomTree {
    pub system: EqSystem,
    pub triangular: TriangularSystem,
    pub branches: Vec<Branch>,
}

pub fn build_hom_tree(
    s: &EqSystem,
    cfg: &CanonicalConfig,
    solver: &dyn LeafSolver,
) -> Result<HomTree> {
    let triangular = s.triangulate();
    let instances = generate_instances(&triangular, cfg)?;
    let branches = instances
        .into_par_iter()
        .map(|instance| {
            let leaf = solver.solve(&instance.system);
            Branch { instance, leaf }
        })
        .collect();
    Ok(HomTree {
        system: s.clone(),
        triangular,
        branches,
    })
}

impl HomTree {
    /// Enumerates the family of a branch: every leaf solution, every choice
    /// of free-variable images of length at most `radius`, pushed through
    /// `rho` and restricted to the original variables.
    pub fn branch_family(&self, b: usize, radius: usize) -> Vec<Assignment> {
        let branch = &self.branches[b];
        let Ok(leaf) = &branch.leaf else {
            return Vec::new();
        };
        let group = &self.triangular.group;
        let values = ball(group.generators(), radius);
        let mut frees: Vec<Assignment> = vec![Assignment::new()];
        for y in &leaf.free_variables {
            frees = frees
                .into_iter()
                .flat_map(|a| {
                    values.iter().map(move |v| {
                        let mut a = a.clone();
                        a.insert(y.clone(), v.clone());
                        a
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for sol in &leaf.solutions {
            for f in &frees {
                let mut phi = sol.clone();
                phi.extend(f.clone());
                let psi: Assignment = self
                    .triangular
                    .original_variables
                    .iter()
                    .map(|z| {
                        (
                            z.clone(),
                            theta(group, &branch.instance.rho[z].substitute_map(&phi)),
                        )
                    })
                    .collect();
                if !out.contains(&psi) {
                    out.push(psi);
                }
            }
        }
        out
    }
}
