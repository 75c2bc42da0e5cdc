use std::fmt;

/// Which execution module handles a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModuleClass {
    Logical,
    Deterministic,
    Counting,
    StringMatch,
    None,
}

/// Result types of expression nodes.
///
/// `DirMask` is a one-sided position mask (left or right of a location) that
/// still knows the distance of every position to that location, so counting
/// constraints can be applied to it. It is accepted wherever `Mask` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Str,
    Anchor,
    Int,
    Seq,
    DirMask,
    Mask,
    SoftMask,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Type::Bool => "bool",
            Type::Str => "string",
            Type::Anchor => "anchor",
            Type::Int => "int",
            Type::Seq => "score-sequence",
            Type::DirMask => "directional-mask",
            Type::Mask => "mask",
            Type::SoftMask => "soft-mask",
        };
        f.write_str(s)
    }
}

/// One overload of a predicate: accepted types per argument, and the result.
#[derive(Debug, Clone, Copy)]
pub struct Signature {
    pub params: &'static [&'static [Type]],
    pub result: Type,
}

const LOC: &[Type] = &[Type::Anchor, Type::Str];
const ANY_MASK: &[Type] = &[Type::DirMask, Type::Mask, Type::SoftMask];
const DET_MASK: &[Type] = &[Type::DirMask, Type::Mask];

const SIG_UNARY_BOOL: &[Signature] = &[Signature { params: &[&[Type::Bool]], result: Type::Bool }];
const SIG_BINARY_BOOL: &[Signature] = &[Signature { params: &[&[Type::Bool], &[Type::Bool]], result: Type::Bool }];
const SIG_ANCHOR: &[Signature] = &[Signature { params: &[], result: Type::Anchor }];
const SIG_CONST_BOOL: &[Signature] = &[Signature { params: &[], result: Type::Bool }];
const SIG_INT: &[Signature] = &[Signature { params: &[], result: Type::Int }];
const SIG_STR: &[Signature] = &[Signature { params: &[], result: Type::Str }];
const SIG_IS: &[Signature] = &[Signature { params: &[&[Type::Seq, Type::Anchor], ANY_MASK], result: Type::Bool }];
const SIG_OCCUR: &[Signature] = &[Signature { params: &[&[Type::Seq]], result: Type::Bool }];
const SIG_SIDE: &[Signature] = &[Signature { params: &[LOC], result: Type::DirMask }];
const SIG_BETWEEN: &[Signature] = &[Signature { params: &[LOC, LOC], result: Type::Mask }];
const SIG_WITHIN: &[Signature] = &[Signature { params: &[LOC, &[Type::Int]], result: Type::Mask }];
const SIG_NUMBER_OF: &[Signature] = &[Signature { params: &[DET_MASK], result: Type::Int }];
const SIG_COUNT: &[Signature] = &[
    Signature { params: &[&[Type::DirMask], &[Type::Int]], result: Type::SoftMask },
    Signature { params: &[&[Type::Int], &[Type::Int]], result: Type::Bool },
];
const SIG_DIRECT: &[Signature] = &[Signature { params: &[&[Type::DirMask]], result: Type::SoftMask }];
const SIG_WORD: &[Signature] = &[Signature { params: &[&[Type::Str]], result: Type::Seq }];
const SIG_CONTAINS: &[Signature] = &[Signature { params: &[&[Type::Anchor], &[Type::Str]], result: Type::Seq }];
const SIG_LINK: &[Signature] = &[Signature { params: &[&[Type::Str], LOC, LOC], result: Type::Seq }];

macro_rules! predicates {
    ($($variant:ident => $name:literal, $class:ident, $arity:literal, $sigs:ident;)*) => {
        /// The predicate inventory.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Predicate {
            $($variant,)*
        }

        impl Predicate {
            pub const ALL: &'static [Predicate] = &[$(Predicate::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(Predicate::$variant => $name,)* }
            }

            pub fn from_name(name: &str) -> Option<Predicate> {
                match name { $($name => Some(Predicate::$variant),)* _ => None }
            }

            pub fn module_class(self) -> ModuleClass {
                match self { $(Predicate::$variant => ModuleClass::$class,)* }
            }

            /// Number of child expressions. Literal predicates (`Int`, `Token`,
            /// `String`) carry a payload instead and have arity 0.
            pub fn arity(self) -> usize {
                match self { $(Predicate::$variant => $arity,)* }
            }

            pub fn signatures(self) -> &'static [Signature] {
                match self { $(Predicate::$variant => $sigs,)* }
            }
        }
    };
}

predicates! {
    Because   => "Because",   None, 1, SIG_UNARY_BOOL;
    Separator => "Separator", None, 2, SIG_BINARY_BOOL;
    ArgX      => "ArgX",      None, 0, SIG_ANCHOR;
    ArgY      => "ArgY",      None, 0, SIG_ANCHOR;
    Arg       => "Arg",       None, 0, SIG_ANCHOR;
    Int       => "Int",       None, 0, SIG_INT;
    Token     => "Token",     None, 0, SIG_STR;
    String    => "String",    None, 0, SIG_STR;
    True      => "True",      None, 0, SIG_CONST_BOOL;
    False     => "False",     None, 0, SIG_CONST_BOOL;
    And       => "And",       Logical, 2, SIG_BINARY_BOOL;
    Or        => "Or",        Logical, 2, SIG_BINARY_BOOL;
    Not       => "Not",       Logical, 1, SIG_UNARY_BOOL;
    Is        => "Is",        Logical, 2, SIG_IS;
    Occur     => "Occur",     Logical, 1, SIG_OCCUR;
    Left      => "Left",      Deterministic, 1, SIG_SIDE;
    Right     => "Right",     Deterministic, 1, SIG_SIDE;
    Between   => "Between",   Deterministic, 2, SIG_BETWEEN;
    Within    => "Within",    Deterministic, 2, SIG_WITHIN;
    NumberOf  => "NumberOf",  Deterministic, 1, SIG_NUMBER_OF;
    AtMost    => "AtMost",    Counting, 2, SIG_COUNT;
    AtLeast   => "AtLeast",   Counting, 2, SIG_COUNT;
    Direct    => "Direct",    Counting, 1, SIG_DIRECT;
    MoreThan  => "MoreThan",  Counting, 2, SIG_COUNT;
    LessThan  => "LessThan",  Counting, 2, SIG_COUNT;
    Equals    => "Equals",    Counting, 2, SIG_COUNT;
    Word      => "Word",      StringMatch, 1, SIG_WORD;
    Contains  => "Contains",  StringMatch, 2, SIG_CONTAINS;
    Link      => "Link",      StringMatch, 3, SIG_LINK;
}

impl Predicate {
    pub fn is_literal(self) -> bool {
        matches!(self, Predicate::Int | Predicate::Token | Predicate::String)
    }

    /// Anchor role named by an anchor predicate.
    pub fn anchor_role(self) -> Option<super::AnchorRole> {
        use super::AnchorRole;
        match self {
            Predicate::ArgX => Some(AnchorRole::Subject),
            Predicate::ArgY => Some(AnchorRole::Object),
            Predicate::Arg => Some(AnchorRole::Term),
            _ => None,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_classes_follow_inventory() {
        use Predicate::*;
        let logical = [And, Or, Not, Is, Occur];
        let det = [Left, Right, Between, Within, NumberOf];
        let counting = [AtMost, AtLeast, Direct, MoreThan, LessThan, Equals];
        let string = [Word, Contains, Link];
        for p in Predicate::ALL {
            let expected = if logical.contains(p) {
                ModuleClass::Logical
            } else if det.contains(p) {
                ModuleClass::Deterministic
            } else if counting.contains(p) {
                ModuleClass::Counting
            } else if string.contains(p) {
                ModuleClass::StringMatch
            } else {
                ModuleClass::None
            };
            assert_eq!(p.module_class(), expected, "{p}");
        }
        assert_eq!(Predicate::ALL.len(), 29);
    }

    #[test]
    fn names_round_trip() {
        for p in Predicate::ALL {
            assert_eq!(Predicate::from_name(p.name()), Some(*p));
        }
        assert_eq!(Predicate::from_name("Nope"), None);
    }

    #[test]
    fn signatures_match_arity() {
        for p in Predicate::ALL {
            for sig in p.signatures() {
                assert_eq!(sig.params.len(), p.arity(), "{p}");
            }
        }
    }
}
