//! Ground values and their type tags.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

/// Exact rational used by the numeric payload mode.
pub type Rational = Ratio<i64>;

/// A channel: `channel(i)` or the distinguished broadcast channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChannelId {
    Indexed(u64),
    Broadcast,
}

/// Where a symbolic row comes from: a row of `A`, or a row of the product `AB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowSource {
    A,
    Prod,
}

/// Control location of a sequential process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTag {
    Bool,
    Nat,
    Chan,
    Tuple(Vec<TypeTag>),
    Set(Box<TypeTag>),
    Row,
    Matrix,
    Node,
    Array(Box<TypeTag>),
    /// Element type of an empty set or array literal; unifies with anything.
    Any,
}

impl TypeTag {
    pub fn set_of(elem: TypeTag) -> Self {
        TypeTag::Set(Box::new(elem))
    }

    pub fn array_of(elem: TypeTag) -> Self {
        TypeTag::Array(Box::new(elem))
    }

    /// Structural compatibility where `Any` matches every type.
    pub fn compatible(&self, other: &TypeTag) -> bool {
        match (self, other) {
            (TypeTag::Any, _) | (_, TypeTag::Any) => true,
            (TypeTag::Tuple(a), TypeTag::Tuple(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.compatible(y))
            }
            (TypeTag::Set(a), TypeTag::Set(b)) | (TypeTag::Array(a), TypeTag::Array(b)) => {
                a.compatible(b)
            }
            _ => self == other,
        }
    }

    /// Value a variable of this type holds when its declaration has no initializer.
    pub fn default_value(&self) -> Value {
        match self {
            TypeTag::Bool => Value::Bool(false),
            TypeTag::Nat | TypeTag::Any => Value::Nat(0),
            TypeTag::Chan => Value::Chan(ChannelId::Indexed(0)),
            TypeTag::Tuple(items) => Value::Tuple(items.iter().map(TypeTag::default_value).collect()),
            TypeTag::Set(_) => Value::Set(BTreeSet::new()),
            TypeTag::Row => Value::Star,
            TypeTag::Matrix => Value::MatrixAtom(String::from("B")),
            TypeTag::Node => Value::Node(NodeId(0)),
            TypeTag::Array(_) => Value::Array(Vec::new()),
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Bool => f.write_str("bool"),
            TypeTag::Nat => f.write_str("nat"),
            TypeTag::Chan => f.write_str("chan"),
            TypeTag::Row => f.write_str("row"),
            TypeTag::Matrix => f.write_str("matrix"),
            TypeTag::Node => f.write_str("node"),
            TypeTag::Any => f.write_str("any"),
            TypeTag::Set(e) => write!(f, "set<{e}>"),
            TypeTag::Array(e) => write!(f, "array<{e}>"),
            TypeTag::Tuple(items) => {
                f.write_str("(")?;
                for (k, t) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A ground datum. Equality is structural and is the only equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(u64),
    Chan(ChannelId),
    Tuple(Vec<Value>),
    Set(BTreeSet<Value>),
    /// Symbolic row `A_i` or `(AB)_i`.
    Row(RowSource, u64),
    /// The empty payload `*`.
    Star,
    MatrixAtom(String),
    Node(NodeId),
    QRow(Vec<Rational>),
    QMatrix(Vec<Vec<Rational>>),
    /// 1-based array whose cells may be unset.
    Array(Vec<Option<Value>>),
}

impl Value {
    pub fn nat_set<I: IntoIterator<Item = u64>>(items: I) -> Value {
        Value::Set(items.into_iter().map(Value::Nat).collect())
    }

    pub fn type_of(&self) -> TypeTag {
        match self {
            Value::Bool(_) => TypeTag::Bool,
            Value::Nat(_) => TypeTag::Nat,
            Value::Chan(_) => TypeTag::Chan,
            Value::Tuple(items) => TypeTag::Tuple(items.iter().map(Value::type_of).collect()),
            Value::Set(items) => {
                TypeTag::set_of(items.iter().next().map_or(TypeTag::Any, Value::type_of))
            }
            Value::Row(..) | Value::Star | Value::QRow(_) => TypeTag::Row,
            Value::MatrixAtom(_) | Value::QMatrix(_) => TypeTag::Matrix,
            Value::Node(_) => TypeTag::Node,
            Value::Array(cells) => TypeTag::array_of(
                cells.iter().flatten().next().map_or(TypeTag::Any, Value::type_of),
            ),
        }
    }

    /// Whether this value may be stored in a variable of type `ty`.
    pub fn conforms(&self, ty: &TypeTag) -> bool {
        match (self, ty) {
            (_, TypeTag::Any) => true,
            (Value::Tuple(items), TypeTag::Tuple(tys)) => {
                items.len() == tys.len() && items.iter().zip(tys).all(|(v, t)| v.conforms(t))
            }
            (Value::Set(items), TypeTag::Set(elem)) => items.iter().all(|v| v.conforms(elem)),
            (Value::Array(cells), TypeTag::Array(elem)) => {
                cells.iter().flatten().all(|v| v.conforms(elem))
            }
            _ => self.type_of().compatible(ty),
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(k) => Some(*k),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(items) => Some(items),
            _ => None,
        }
    }

    /// Cell `k` (1-based) of an array value; `None` if out of range or unset.
    pub fn cell(&self, k: u64) -> Option<&Value> {
        match self {
            Value::Array(cells) if k >= 1 => cells.get((k - 1) as usize)?.as_ref(),
            _ => None,
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Renders values in the model-file literal syntax, so the output parses back
/// to the same constant.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(k) => write!(f, "{k}"),
            Value::Chan(ChannelId::Indexed(k)) => write!(f, "c[{k}]"),
            Value::Chan(ChannelId::Broadcast) => f.write_str("bcast"),
            Value::Tuple(items) => {
                f.write_str("(")?;
                write_list(f, items)?;
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
            Value::Set(items) => {
                f.write_str("{")?;
                write_list(f, items)?;
                f.write_str("}")
            }
            Value::Row(RowSource::A, k) => write!(f, "row(A, {k})"),
            Value::Row(RowSource::Prod, k) => write!(f, "row(AB, {k})"),
            Value::Star => f.write_str("*"),
            Value::MatrixAtom(name) => write!(f, "matrix({name})"),
            Value::Node(n) => write!(f, "node({})", n.0),
            Value::QRow(xs) => {
                f.write_str("qrow(")?;
                write_list(f, xs)?;
                f.write_str(")")
            }
            Value::QMatrix(rows) => {
                f.write_str("qmatrix(")?;
                for (k, row) in rows.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str("qrow(")?;
                    write_list(f, row)?;
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Value::Array(cells) => {
                f.write_str("[")?;
                for (k, cell) in cells.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    match cell {
                        Some(v) => write!(f, "{v}")?,
                        None => f.write_str("_")?,
                    }
                }
                f.write_str("]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn prod_rows_differ_from_a_rows() {
        for i in 1..5 {
            assert_ne!(Value::Row(RowSource::Prod, i), Value::Row(RowSource::A, i));
        }
    }

    #[test]
    fn star_is_distinct() {
        assert_ne!(Value::Star, Value::Tuple(vec![]));
        assert_ne!(Value::Star, Value::Row(RowSource::A, 1));
        assert_eq!(Value::Star.type_of(), TypeTag::Row);
    }

    #[test]
    fn broadcast_differs_from_indexed() {
        assert_ne!(ChannelId::Broadcast, ChannelId::Indexed(0));
    }

    #[test]
    fn display_literals() {
        let v = Value::Tuple(vec![Value::Row(RowSource::A, 3), Value::Nat(0), Value::Nat(3)]);
        assert_eq!(v.to_string(), "(row(A, 3), 0, 3)");
        assert_eq!(Value::nat_set([2, 1]).to_string(), "{1, 2}");
        assert_eq!(Value::Array(vec![None, Some(Value::Star)]).to_string(), "[_, *]");
        let q = Value::QRow(vec![Rational::new(1, 2), Rational::from_integer(-3)]);
        assert_eq!(q.to_string(), "qrow(1/2, -3)");
    }

    #[test]
    fn conformance() {
        let arr = Value::Array(vec![None, Some(Value::Row(RowSource::A, 1))]);
        assert!(arr.conforms(&TypeTag::array_of(TypeTag::Row)));
        assert!(!Value::Nat(1).conforms(&TypeTag::Bool));
        assert!(Value::nat_set([]).conforms(&TypeTag::set_of(TypeTag::Nat)));
    }
}
