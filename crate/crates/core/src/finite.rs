//! Small permutation groups used as exact oracles: solution sets of systems
//! over them can be enumerated completely.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::word::{signed_letters, Symbol, Word};

pub type Perm = Vec<usize>;

fn compose(p: &Perm, q: &Perm) -> Perm {
    // apply p first, then q
    p.iter().map(|&i| q[i]).collect()
}

fn invert(p: &Perm) -> Perm {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// A permutation group with named generators. Elements are enumerated once
/// at construction, each with a shortest representative word.
#[derive(Clone, Debug)]
pub struct PermGroup {
    name: String,
    degree: usize,
    gens: Vec<(Symbol, Perm)>,
    elements: Vec<(Perm, Word)>,
}

impl PermGroup {
    pub fn new(name: &str, degree: usize, gens: Vec<(Symbol, Perm)>) -> Result<Self> {
        for (s, p) in &gens {
            let mut seen = vec![false; degree];
            if p.len() != degree
                || p.iter()
                    .any(|&i| i >= degree || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::Invalid(format!(
                    "`{s}` is not a permutation of degree {degree}"
                )));
            }
        }
        let id: Perm = (0..degree).collect();
        let mut index: HashMap<Perm, usize> = HashMap::new();
        let mut elements = vec![(id.clone(), Word::empty())];
        index.insert(id, 0);
        let mut queue = VecDeque::from([0usize]);
        let syms: Vec<Symbol> = gens.iter().map(|(s, _)| s.clone()).collect();
        let letters = signed_letters(&syms);
        while let Some(i) = queue.pop_front() {
            for l in &letters {
                let g = &gens.iter().find(|(s, _)| *s == l.symbol).unwrap().1;
                let g = if l.inverse { invert(g) } else { g.clone() };
                let p = compose(&elements[i].0, &g);
                if !index.contains_key(&p) {
                    let w = elements[i].1.mul(&Word::letter(l.clone()));
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push((p, w));
                }
            }
        }
        Ok(PermGroup {
            name: name.to_string(),
            degree,
            gens,
            elements,
        })
    }

    /// The symmetric group on three points: `names[0]` a transposition and
    /// `names[1]` a 3-cycle.
    pub fn s3(names: &[Symbol]) -> Self {
        let g = vec![
            (names[0].clone(), vec![1, 0, 2]),
            (names[1].clone(), vec![1, 2, 0]),
        ];
        PermGroup::new("S3", 3, g).unwrap()
    }

    /// The dihedral group of order 8: `names[0]` a rotation of the square and
    /// `names[1]` a reflection.
    pub fn d4(names: &[Symbol]) -> Self {
        let g = vec![
            (names[0].clone(), vec![1, 2, 3, 0]),
            (names[1].clone(), vec![0, 3, 2, 1]),
        ];
        PermGroup::new("D4", 4, g).unwrap()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// One representative word per element, identity first.
    pub fn element_words(&self) -> Vec<Word> {
        self.elements.iter().map(|(_, w)| w.clone()).collect()
    }

    pub fn evaluate(&self, w: &Word) -> Result<Perm> {
        let mut p: Perm = (0..self.degree).collect();
        for l in w.letters() {
            let g = &self
                .gens
                .iter()
                .find(|(s, _)| *s == l.symbol)
                .ok_or_else(|| Error::AlphabetMismatch(l.symbol.to_string()))?
                .1;
            p = if l.inverse {
                compose(&p, &invert(g))
            } else {
                compose(&p, g)
            };
        }
        Ok(p)
    }

    /// The representative word of the element `w` evaluates to.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let p = self.evaluate(w)?;
        Ok(self
            .elements
            .iter()
            .find(|(q, _)| *q == p)
            .unwrap()
            .1
            .clone())
    }
}

impl Group for PermGroup {
    fn name(&self) -> &str {
        &self.name
    }

    fn generators(&self) -> Vec<Symbol> {
        self.gens.iter().map(|(s, _)| s.clone()).collect()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        let p = self.evaluate(w)?;
        Ok(p.iter().enumerate().all(|(i, &j)| i == j))
    }
}
