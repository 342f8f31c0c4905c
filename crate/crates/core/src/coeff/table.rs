use std::collections::BTreeMap;

use super::mpoly::Monomial;
use super::symbol::{is_valid_param_name, Symbol};
use super::{Coeff, CoeffError};

/// Declared parameters, exponential symbols and resonances of a session.
///
/// Built once during setup and read-only afterwards.
#[derive(Clone, Debug, Default)]
pub struct ParamTable {
    params: Vec<Symbol>,
    exps: Vec<Symbol>,
    resonances: BTreeMap<Symbol, Coeff>,
}

impl ParamTable {
    pub fn new() -> Self {
        ParamTable::default()
    }

    pub fn declare_param(&mut self, name: &str) -> Result<Symbol, CoeffError> {
        if !is_valid_param_name(name) {
            return Err(CoeffError::InvalidName(name.to_string()));
        }
        let s = Symbol::param(name);
        if self.params.contains(&s) {
            return Err(CoeffError::DuplicateSymbol(name.to_string()));
        }
        self.params.push(s);
        Ok(s)
    }

    /// Registers `E[atom]`; every symbol in the atom must be a declared parameter.
    pub fn declare_exp(&mut self, atom: Monomial) -> Result<Symbol, CoeffError> {
        let s = self.exp_symbol(atom)?;
        if self.exps.contains(&s) {
            return Err(CoeffError::DuplicateSymbol(s.name().to_string()));
        }
        self.exps.push(s);
        Ok(s)
    }

    /// Like [`declare_exp`](Self::declare_exp) but accepts repeats.
    pub fn ensure_exp(&mut self, atom: Monomial) -> Result<Symbol, CoeffError> {
        let s = self.exp_symbol(atom)?;
        if !self.exps.contains(&s) {
            self.exps.push(s);
        }
        Ok(s)
    }

    fn exp_symbol(&self, atom: Monomial) -> Result<Symbol, CoeffError> {
        for (s, _) in atom.iter() {
            if !self.params.contains(&s) {
                return Err(CoeffError::UnknownSymbol(s.name().to_string()));
            }
        }
        Ok(Symbol::exp(atom))
    }

    /// Declares `s = value` for an exponential symbol `s`.
    pub fn set_resonance(&mut self, s: Symbol, value: Coeff) -> Result<(), CoeffError> {
        if !s.is_exp() {
            return Err(CoeffError::NotExponential(s.name().to_string()));
        }
        if !self.exps.contains(&s) {
            return Err(CoeffError::UnknownSymbol(s.name().to_string()));
        }
        if value.is_zero() || value.contains_exp() {
            return Err(CoeffError::InvalidResonance(s.name().to_string()));
        }
        for u in value.symbols() {
            if !self.params.contains(&u) {
                return Err(CoeffError::UnknownSymbol(u.name().to_string()));
            }
        }
        self.resonances.insert(s, value);
        Ok(())
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn exp_symbols(&self) -> &[Symbol] {
        &self.exps
    }

    pub fn param(&self, name: &str) -> Option<Symbol> {
        self.params.iter().copied().find(|s| s.name() == name)
    }

    pub fn resonance(&self, s: Symbol) -> Option<&Coeff> {
        self.resonances.get(&s)
    }

    pub fn resonances(&self) -> impl Iterator<Item = (Symbol, &Coeff)> {
        self.resonances.iter().map(|(s, c)| (*s, c))
    }

    pub fn has_resonances(&self) -> bool {
        !self.resonances.is_empty()
    }

    /// Whether every symbol of `c` is known to this table. Exponential
    /// symbols over declared parameters count as known.
    pub fn check(&self, c: &Coeff) -> Result<(), CoeffError> {
        for s in c.symbols() {
            let known = match s.exp_atom() {
                Some(atom) => atom.iter().all(|(p, _)| self.params.contains(&p)),
                None => self.params.contains(&s),
            };
            if !known {
                return Err(CoeffError::UnknownSymbol(s.name().to_string()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations() {
        let mut t = ParamTable::new();
        let a = t.declare_param("a").unwrap();
        assert_eq!(t.declare_param("a"), Err(CoeffError::DuplicateSymbol("a".into())));
        assert!(matches!(t.declare_param("X"), Err(CoeffError::InvalidName(_))));
        let e = t.declare_exp(Monomial::var(a)).unwrap();
        assert!(t.declare_exp(Monomial::var(a)).is_err());
        assert_eq!(t.ensure_exp(Monomial::var(a)).unwrap(), e);
        assert!(matches!(
            t.declare_exp(Monomial::var(Symbol::param("zz"))),
            Err(CoeffError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn resonance_values_are_validated() {
        let mut t = ParamTable::new();
        let a = t.declare_param("a").unwrap();
        let e = t.declare_exp(Monomial::var(a)).unwrap();
        assert!(matches!(
            t.set_resonance(e, Coeff::zero()),
            Err(CoeffError::InvalidResonance(_))
        ));
        assert!(matches!(
            t.set_resonance(e, Coeff::symbol(e)),
            Err(CoeffError::InvalidResonance(_))
        ));
        assert!(matches!(
            t.set_resonance(a, Coeff::one()),
            Err(CoeffError::NotExponential(_))
        ));
        t.set_resonance(e, Coeff::int(-1)).unwrap();
        assert_eq!(t.resonance(e), Some(&Coeff::int(-1)));
    }
}
