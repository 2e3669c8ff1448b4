//! Bindings as substitutions `θ: 𝒳 → ℰ`, identity outside their domain.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use super::{EvalError, Term, Valuation};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding(BTreeMap<String, Term>);

impl Binding {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Adds `x ↦ t`; a trivial `x ↦ x` entry is dropped so equal bindings
    /// compare equal.
    pub fn with(mut self, x: &str, t: Term) -> Self {
        self.insert(x, t);
        self
    }

    pub fn insert(&mut self, x: &str, t: Term) {
        if t == Term::var(x) {
            self.0.remove(x);
        } else {
            self.0.insert(x.to_string(), t);
        }
    }

    /// `θ(x)`.
    pub fn image(&self, x: &str) -> Term {
        self.0.get(x).cloned().unwrap_or_else(|| Term::var(x))
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Evaluates every image; images must be ground.
    pub fn to_valuation(&self) -> Result<Valuation, EvalError> {
        let empty = Valuation::new();
        let mut out = Valuation::new();
        for (x, t) in &self.0 {
            out.insert(x, t.eval(&empty)?);
        }
        Ok(out)
    }
}

/// `e^θ`: replaces every variable occurrence by its image.
pub fn substitute(t: &Term, theta: &Binding) -> Term {
    match t {
        Term::Var(x) => theta.image(x),
        Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute(a, theta)).collect()),
        Term::Index(b, i) => Term::index(substitute(b, theta), substitute(i, theta)),
    }
}

/// `θθ′` with `(θθ′)(x) = (x^θ)^θ′`.
pub fn compose(theta: &Binding, theta2: &Binding) -> Binding {
    let mut out = Binding::identity();
    for x in theta.domain().chain(theta2.domain()) {
        out.insert(x, substitute(&substitute(&Term::var(x), theta), theta2));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::ops::*;
    use crate::terms::Func;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn identity_substitution() {
        assert_eq!(substitute(&var("x"), &Binding::identity()), var("x"));
    }

    #[test]
    fn direct_substitution() {
        let t = add(var("x"), nat(1));
        let th = Binding::identity().with("x", nat(2));
        assert_eq!(substitute(&t, &th), Term::App(Func::Add, vec![nat(2), nat(1)]));
    }

    #[test]
    fn compose_with_identity() {
        let th = Binding::identity().with("x", add(var("y"), nat(1)));
        assert_eq!(compose(&Binding::identity(), &th), th);
        assert_eq!(compose(&th, &Binding::identity()), th);
    }

    #[test]
    fn compose_chain() {
        let a = Binding::identity().with("x", var("y"));
        let b = Binding::identity().with("y", nat(3));
        let c = compose(&a, &b);
        assert_eq!(c.image("x"), nat(3));
        assert_eq!(c.image("y"), nat(3));
    }

    const VARS: [&str; 3] = ["x", "y", "z"];

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (0u64..5).prop_map(nat),
            (0usize..3).prop_map(|k| var(VARS[k])),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| sub(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| min(a, b)),
            ]
        })
    }

    fn arb_binding() -> impl Strategy<Value = Binding> {
        proptest::collection::vec(proptest::option::of(arb_term()), 3).prop_map(|imgs| {
            let mut b = Binding::identity();
            for (x, img) in VARS.iter().zip(imgs) {
                if let Some(t) = img {
                    b.insert(x, t);
                }
            }
            b
        })
    }

    fn ground_binding() -> impl Strategy<Value = Binding> {
        proptest::collection::vec(0u64..6, 3).prop_map(|vals| {
            let mut b = Binding::identity();
            for (x, v) in VARS.iter().zip(vals) {
                b.insert(x, nat(v));
            }
            b
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        // Evaluating the substituted term under θ′ agrees with evaluating the
        // original under the composed binding.
        #[test]
        fn substitute_then_eval(t in arb_term(), th in arb_binding(), th2 in ground_binding()) {
            let lhs = substitute(&t, &th).eval(&th2.to_valuation().unwrap());
            let composed = compose(&th, &th2).to_valuation().unwrap();
            prop_assert_eq!(lhs, t.eval(&composed));
        }

        #[test]
        fn compose_is_associative(a in arb_binding(), b in arb_binding(), c in arb_binding()) {
            let left = compose(&compose(&a, &b), &c);
            let right = compose(&a, &compose(&b, &c));
            for x in VARS {
                prop_assert_eq!(left.image(x), right.image(x));
            }
        }
    }

    #[test]
    fn images_of_composition_are_pointwise() {
        // (θθ′)(x) computed by hand for a small case.
        let a = Binding::identity().with("x", add(var("y"), var("z")));
        let b = Binding::identity().with("y", nat(1)).with("z", var("y"));
        let c = compose(&a, &b);
        assert_eq!(c.image("x"), add(nat(1), var("y")));
        assert_eq!(c.image("z"), var("y"));
    }
}
