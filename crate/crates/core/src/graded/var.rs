use std::cmp::{Ordering, Reverse};
use std::fmt;
use std::sync::Arc;

/// A partial derivative `D_α f` of an opaque function symbol.
///
/// `orders` is aligned with the symbol's dependency list; all zeros is the
/// symbol itself. Mixed partials are identified because the multi-index is
/// unordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet {
    pub symbol: Arc<str>,
    pub deps: Arc<[Arc<str>]>,
    pub orders: Vec<u32>,
}

impl Jet {
    pub fn base(symbol: Arc<str>, deps: Arc<[Arc<str>]>) -> Self {
        let orders = vec![0; deps.len()];
        Jet {
            symbol,
            deps,
            orders,
        }
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().sum()
    }

    /// The jet obtained by one more derivative along dependency `pos`.
    pub fn bumped(&self, pos: usize) -> Self {
        let mut next = self.clone();
        next.orders[pos] += 1;
        next
    }

    fn key(&self) -> (&str, u32, Reverse<&[u32]>) {
        (&self.symbol, self.total_order(), Reverse(&self.orders))
    }
}

impl PartialOrd for Jet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Jet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if self.total_order() == 0 {
            return Ok(());
        }
        let short = self.deps.iter().all(|d| d.chars().count() == 1);
        let mut parts = Vec::new();
        for (dep, &k) in self.deps.iter().zip(&self.orders) {
            for _ in 0..k {
                parts.push(dep.as_ref());
            }
        }
        if short {
            write!(f, "_{}", parts.concat())
        } else {
            write!(f, "_{}", parts.join("_"))
        }
    }
}

/// Indeterminate of the even coefficient field: an even coordinate or a jet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Coord(Arc<str>),
    Jet(Arc<Jet>),
}

impl Var {
    pub fn coord(name: &str) -> Self {
        Var::Coord(Arc::from(name))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Coord(name) => f.write_str(name),
            Var::Jet(jet) => jet.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deps(names: &[&str]) -> Arc<[Arc<str>]> {
        names.iter().map(|n| Arc::from(*n)).collect()
    }

    #[test]
    fn jet_rendering() {
        let h = Jet::base(Arc::from("h"), deps(&["x", "y"]));
        assert_eq!(h.to_string(), "h");
        assert_eq!(h.bumped(0).to_string(), "h_x");
        assert_eq!(h.bumped(0).bumped(0).bumped(1).to_string(), "h_xxy");
        let f = Jet::base(Arc::from("f"), deps(&["r", "theta"]));
        assert_eq!(f.bumped(1).bumped(0).to_string(), "f_r_theta");
    }

    #[test]
    fn mixed_partials_coincide() {
        let h = Jet::base(Arc::from("h"), deps(&["x", "y"]));
        assert_eq!(h.bumped(0).bumped(1), h.bumped(1).bumped(0));
    }

    #[test]
    fn jet_order_is_by_symbol_then_total_order() {
        let h = Jet::base(Arc::from("h"), deps(&["x", "y"]));
        assert!(h < h.bumped(0));
        assert!(h.bumped(0) < h.bumped(1));
        assert!(h.bumped(1) < h.bumped(0).bumped(0));
        assert!(Var::coord("y") < Var::Jet(Arc::new(h)));
    }
}
