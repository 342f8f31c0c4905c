//! Interned parameter and exponential symbols.
//!
//! Symbols live for the whole process; equality is pointer equality and
//! ordering is by name, so the canonical term order of a coefficient never
//! depends on the order in which symbols were first seen.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use super::mpoly::Monomial;

struct SymbolInfo {
    name: Box<str>,
    /// For an exponential symbol `E[m]`, the monomial `m` it exponentiates.
    exp_atom: Option<Monomial>,
}

/// A parameter symbol (`a`, `t`, `λ`, ...) or an exponential symbol `E[m]`.
#[derive(Clone, Copy)]
pub struct Symbol(&'static SymbolInfo);

fn interner() -> &'static Mutex<HashMap<Box<str>, &'static SymbolInfo>> {
    static TABLE: OnceLock<Mutex<HashMap<Box<str>, &'static SymbolInfo>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn intern(name: String, exp_atom: Option<Monomial>) -> Symbol {
    let mut table = interner().lock().expect("symbol table poisoned");
    if let Some(info) = table.get(name.as_str()) {
        return Symbol(info);
    }
    let info: &'static SymbolInfo = Box::leak(Box::new(SymbolInfo {
        name: name.clone().into_boxed_str(),
        exp_atom,
    }));
    table.insert(name.into_boxed_str(), info);
    Symbol(info)
}

/// Returns true when `name` can be used as a parameter symbol.
pub fn is_valid_param_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_alphabetic() || first == '_') {
        return false;
    }
    if !chars.all(|c| c.is_alphanumeric() || c == '_') {
        return false;
    }
    !matches!(name, "X" | "Y" | "E" | "dX" | "dY")
}

impl Symbol {
    /// Interns a parameter symbol. Panics on names that are not identifiers
    /// or that clash with the reserved names `X`, `Y`, `E`, `dX`, `dY`.
    pub fn param(name: &str) -> Symbol {
        assert!(is_valid_param_name(name), "invalid parameter name {name:?}");
        intern(name.to_string(), None)
    }

    /// The exponential symbol `E[atom]`, a formal `e^atom`. The atom must be a
    /// monomial in parameter symbols (the empty monomial stands for `e^1`).
    pub fn exp(atom: Monomial) -> Symbol {
        assert!(
            atom.iter().all(|(s, _)| !s.is_exp()),
            "exponential atoms must not contain exponential symbols"
        );
        let name = format!("E[{atom}]");
        intern(name, Some(atom))
    }

    pub fn name(&self) -> &'static str {
        &self.0.name
    }

    pub fn is_exp(&self) -> bool {
        self.0.exp_atom.is_some()
    }

    /// The monomial exponentiated by an exponential symbol.
    pub fn exp_atom(&self) -> Option<&'static Monomial> {
        self.0.exp_atom.as_ref()
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if std::ptr::eq(self.0, other.0) {
            Ordering::Equal
        } else {
            self.0.name.cmp(&other.0.name)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Symbol::param("a");
        let b = Symbol::param("a");
        assert_eq!(a, b);
        assert!(std::ptr::eq(a.name(), b.name()));
        assert!(Symbol::param("a") < Symbol::param("b"));
    }

    #[test]
    fn exp_symbol_names() {
        let b = Symbol::param("b");
        let t = Symbol::param("t");
        let e = Symbol::exp(Monomial::from_pairs([(t, 1), (b, 1)]));
        assert_eq!(e.name(), "E[b*t]");
        assert!(e.is_exp());
        assert_eq!(Symbol::exp(Monomial::one()).name(), "E[1]");
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(!is_valid_param_name("X"));
        assert!(!is_valid_param_name("dY"));
        assert!(!is_valid_param_name("2a"));
        assert!(is_valid_param_name("λ"));
        assert!(is_valid_param_name("a_1"));
    }
}
