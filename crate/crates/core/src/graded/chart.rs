use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use serde::Serialize;

use super::even::EvenScalar;
use super::var::{Jet, Var};
use super::GradedError;

/// Z2 degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{|a||b|}` as `true` for a minus sign.
    pub fn koszul(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: Arc<str>,
    pub parity: Parity,
}

/// Opaque smooth function of some even coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSymbol {
    name: Arc<str>,
    deps: Arc<[Arc<str>]>,
    registered: BTreeMap<Arc<str>, EvenScalar>,
    invertible: bool,
}

impl FunctionSymbol {
    pub fn new(name: &str, deps: &[&str], invertible: bool) -> Self {
        FunctionSymbol {
            name: Arc::from(name),
            deps: deps.iter().map(|d| Arc::from(*d)).collect(),
            registered: BTreeMap::new(),
            invertible,
        }
    }

    /// Attaches closed-form first partials. Either every dependency gets one
    /// or none does, so that jets of positive order never mix with them.
    pub fn with_derivatives(
        mut self,
        derivatives: BTreeMap<String, EvenScalar>,
    ) -> Result<Self, GradedError> {
        let deps: BTreeSet<&str> = self.deps.iter().map(|d| d.as_ref()).collect();
        let given: BTreeSet<&str> = derivatives.keys().map(String::as_str).collect();
        if deps != given {
            return Err(GradedError::BadSymbol(format!(
                "derivatives of `{}` must be registered for exactly its dependencies",
                self.name
            )));
        }
        self.registered = derivatives
            .into_iter()
            .map(|(k, v)| (Arc::from(k.as_str()), v))
            .collect();
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn deps(&self) -> &[Arc<str>] {
        &self.deps
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    pub fn registered_derivative(&self, coord: &str) -> Option<&EvenScalar> {
        self.registered.get(coord)
    }

    pub fn has_registered_derivatives(&self) -> bool {
        !self.registered.is_empty()
    }

    /// The symbol itself as an indeterminate.
    pub fn value(&self) -> EvenScalar {
        EvenScalar::var(Var::Jet(Arc::new(Jet::base(
            self.name.clone(),
            self.deps.clone(),
        ))))
    }

    /// The jet with the given per-dependency orders.
    pub fn jet(&self, orders: Vec<u32>) -> EvenScalar {
        assert_eq!(orders.len(), self.deps.len());
        EvenScalar::var(Var::Jet(Arc::new(Jet {
            symbol: self.name.clone(),
            deps: self.deps.clone(),
            orders,
        })))
    }
}

pub type SymbolTable = BTreeMap<Arc<str>, FunctionSymbol>;

/// Ordered even and odd coordinates plus the function symbols living on them.
///
/// Odd generators are ordered by their position among the chart's
/// coordinates; every sign in the algebra derives from that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    coords: Vec<Coordinate>,
    odd_slot: Vec<Option<u32>>,
    odd_coords: Vec<usize>,
    symbols: SymbolTable,
}

pub const MAX_ODD: usize = 32;

impl Chart {
    pub fn new(coords: Vec<Coordinate>) -> Result<Self, GradedError> {
        let mut seen = BTreeSet::new();
        for c in &coords {
            if c.name.is_empty() {
                return Err(GradedError::BadName(String::new()));
            }
            if !seen.insert(c.name.clone()) {
                return Err(GradedError::DuplicateName(c.name.to_string()));
            }
        }
        let mut odd_slot = Vec::with_capacity(coords.len());
        let mut odd_coords = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            if c.parity.is_odd() {
                odd_slot.push(Some(odd_coords.len() as u32));
                odd_coords.push(i);
            } else {
                odd_slot.push(None);
            }
        }
        if odd_coords.len() > MAX_ODD {
            return Err(GradedError::TooManyOdd(odd_coords.len()));
        }
        Ok(Chart {
            coords,
            odd_slot,
            odd_coords,
            symbols: SymbolTable::new(),
        })
    }

    /// Evens first, then odds, in the given order.
    pub fn from_names(evens: &[&str], odds: &[&str]) -> Result<Self, GradedError> {
        let coords = evens
            .iter()
            .map(|n| (n, Parity::Even))
            .chain(odds.iter().map(|n| (n, Parity::Odd)))
            .map(|(n, parity)| Coordinate {
                name: Arc::from(*n),
                parity,
            })
            .collect();
        Chart::new(coords)
    }

    pub fn with_symbol(mut self, symbol: FunctionSymbol) -> Result<Self, GradedError> {
        if self.symbols.contains_key(symbol.name())
            || self.coords.iter().any(|c| c.name.as_ref() == symbol.name())
        {
            return Err(GradedError::DuplicateName(symbol.name().to_string()));
        }
        for dep in symbol.deps() {
            match self.index_of(dep) {
                Some(i) if !self.coords[i].parity.is_odd() => {}
                Some(_) => {
                    return Err(GradedError::BadSymbol(format!(
                        "`{}` depends on odd coordinate `{dep}`",
                        symbol.name()
                    )))
                }
                None => return Err(GradedError::UnknownCoordinate(dep.to_string())),
            }
        }
        let mut deps: Vec<&Arc<str>> = symbol.deps().iter().collect();
        deps.sort();
        deps.dedup();
        if deps.len() != symbol.deps().len() {
            return Err(GradedError::BadSymbol(format!(
                "`{}` lists a dependency twice",
                symbol.name()
            )));
        }
        self.symbols.insert(symbol.name.clone(), symbol);
        Ok(self)
    }

    pub fn into_shared(self) -> Arc<Chart> {
        Arc::new(self)
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, index: usize) -> &Coordinate {
        &self.coords[index]
    }

    pub fn parity(&self, index: usize) -> Parity {
        self.coords[index].parity
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name.as_ref() == name)
    }

    pub fn odd_count(&self) -> usize {
        self.odd_coords.len()
    }

    /// Odd generator slot of a coordinate, if it is odd.
    pub fn odd_slot(&self, index: usize) -> Option<u32> {
        self.odd_slot[index]
    }

    /// Coordinate index of odd generator `slot`.
    pub fn odd_coord(&self, slot: u32) -> usize {
        self.odd_coords[slot as usize]
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&FunctionSymbol> {
        self.symbols.get(name)
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}
