use std::fmt;
use std::str::FromStr;

/// Atomic categories.
///
/// `S` is a complete boolean statement, `NP` something that can be located or
/// matched (a string, an anchor or a word query), `M` a set of positions, `Q`
/// a quantity of words, `INT` a bare number, `C` the "and" inside "between X
/// and Y", `CONJ` a coordinating conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prim {
    S,
    NP,
    M,
    Q,
    Int,
    C,
    Conj,
}

impl Prim {
    fn name(self) -> &'static str {
        match self {
            Prim::S => "S",
            Prim::NP => "NP",
            Prim::M => "M",
            Prim::Q => "Q",
            Prim::Int => "INT",
            Prim::C => "C",
            Prim::Conj => "CONJ",
        }
    }

    fn from_name(s: &str) -> Option<Prim> {
        Some(match s {
            "S" => Prim::S,
            "NP" => Prim::NP,
            "M" => Prim::M,
            "Q" => Prim::Q,
            "INT" => Prim::Int,
            "C" => Prim::C,
            "CONJ" => Prim::Conj,
            _ => return None,
        })
    }
}

/// `Fwd(a, b)` is `a/b` (wants `b` on the right), `Bwd(a, b)` is `a\b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Prim(Prim),
    Fwd(Box<Category>, Box<Category>),
    Bwd(Box<Category>, Box<Category>),
}

impl Category {
    pub const S: Category = Category::Prim(Prim::S);
    pub const NP: Category = Category::Prim(Prim::NP);

    pub fn fwd(a: Category, b: Category) -> Category {
        Category::Fwd(Box::new(a), Box::new(b))
    }

    pub fn bwd(a: Category, b: Category) -> Category {
        Category::Bwd(Box::new(a), Box::new(b))
    }

    /// Number of arguments before reaching an atomic result.
    pub fn arity(&self) -> usize {
        match self {
            Category::Prim(_) => 0,
            Category::Fwd(a, _) | Category::Bwd(a, _) => 1 + a.arity(),
        }
    }

    pub fn is_prim(&self, p: Prim) -> bool {
        *self == Category::Prim(p)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &Category, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
            match c {
                Category::Prim(p) => f.write_str(p.name()),
                Category::Fwd(a, b) | Category::Bwd(a, b) => {
                    let slash = if matches!(c, Category::Fwd(..)) { '/' } else { '\\' };
                    if !top {
                        f.write_str("(")?;
                    }
                    go(a, f, false)?;
                    write!(f, "{slash}")?;
                    go(b, f, false)?;
                    if !top {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, true)
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let c = parse_cat(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(format!("trailing input in category {s:?}"));
        }
        Ok(c)
    }
}

fn parse_cat(s: &[char], pos: &mut usize) -> Result<Category, String> {
    let mut left = parse_atom(s, pos)?;
    while *pos < s.len() && (s[*pos] == '/' || s[*pos] == '\\') {
        let slash = s[*pos];
        *pos += 1;
        let right = parse_atom(s, pos)?;
        left = if slash == '/' { Category::fwd(left, right) } else { Category::bwd(left, right) };
    }
    Ok(left)
}

fn parse_atom(s: &[char], pos: &mut usize) -> Result<Category, String> {
    if *pos < s.len() && s[*pos] == '(' {
        *pos += 1;
        let c = parse_cat(s, pos)?;
        if *pos >= s.len() || s[*pos] != ')' {
            return Err("unbalanced parentheses in category".into());
        }
        *pos += 1;
        return Ok(c);
    }
    let start = *pos;
    while *pos < s.len() && s[*pos].is_ascii_alphabetic() {
        *pos += 1;
    }
    let name: String = s[start..*pos].iter().collect();
    Prim::from_name(&name).map(Category::Prim).ok_or_else(|| format!("unknown atomic category {name:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for src in ["NP", "(S\\NP)/NP", "((M/NP)/C)/NP", "(M/M)/Q", "S\\NP", "Q\\INT", "S/(S\\NP)"] {
            let c: Category = src.parse().unwrap();
            assert_eq!(c.to_string(), src);
        }
        let c: Category = "M/NP/C/NP".parse().unwrap();
        assert_eq!(c.to_string(), "((M/NP)/C)/NP");
        assert_eq!(c.arity(), 3);
        assert!("X/NP".parse::<Category>().is_err());
        assert!("(S/NP".parse::<Category>().is_err());
    }
}
