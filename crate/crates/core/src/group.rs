//! A minimal interface for "a group with a word problem", so equation
//! solvers can target presentations, towers and finite oracles alike.

use std::sync::Arc;

use crate::error::Result;
use crate::presentation::Presentation;
use crate::tower::Tower;
use crate::word::{Symbol, Word};

pub trait Group: Send + Sync {
    fn name(&self) -> &str;

    fn generators(&self) -> Vec<Symbol>;

    fn is_trivial(&self, w: &Word) -> Result<bool>;

    fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&u.mul(&v.inverse()))
    }

    fn commute(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_trivial(&Word::commutator(u, v))
    }
}

impl Group for Presentation {
    fn name(&self) -> &str {
        Presentation::name(self)
    }

    fn generators(&self) -> Vec<Symbol> {
        Presentation::generators(self).to_vec()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.wp(w)
    }
}

impl Group for Tower {
    fn name(&self) -> &str {
        Tower::name(self)
    }

    fn generators(&self) -> Vec<Symbol> {
        Tower::generators(self)
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.wp(w)
    }
}

impl<G: Group + ?Sized> Group for Arc<G> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn generators(&self) -> Vec<Symbol> {
        (**self).generators()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool> {
        (**self).is_trivial(w)
    }
}
