use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::sexpr::{read_all, Sexp};
use super::{Problem, SourceAtom, SourceClause, SourceLiteral};
use crate::clause::{Signature, Symbol};
use crate::error::{Error, ParseError, Result};
use crate::la::Formula;
use crate::model::SymbolicInterpretation;
use crate::oracle::Window;
use crate::term::{is_integral, LaAtom, LinTerm, Rational, Rel, Theory, Var};

type PResult<T> = std::result::Result<T, ParseError>;

struct Ctx<'a> {
    theory: Theory,
    sig: &'a Signature,
    /// Read `x<i>` as canonical variables.
    canonical: bool,
}

fn number(text: &str) -> Option<Rational> {
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.contains('.') && frac.is_empty() {
        return None;
    }
    let num = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

fn is_identifier(text: &str) -> bool {
    let first = text.chars().next().unwrap_or('0');
    !(first.is_ascii_digit() || (first == '-' && text.len() > 1 && text[1..].starts_with(|c: char| c.is_ascii_digit())))
}

impl Ctx<'_> {
    fn constant(&self, s: &Sexp, r: Rational) -> PResult<Rational> {
        if self.theory.is_integer() && !is_integral(&r) {
            return Err(s.error("fractional constant under lia"));
        }
        Ok(r)
    }

    fn var(&self, name: &str) -> Var {
        if self.canonical {
            if let Some(i) = name.strip_prefix('x').and_then(|d| d.parse::<u32>().ok()).filter(|i| *i >= 1) {
                return Var::canon(i);
            }
        }
        Var::named(name)
    }

    fn term(&self, s: &Sexp) -> PResult<LinTerm> {
        if let Some(text) = s.as_atom() {
            if let Some(r) = number(text) {
                return Ok(LinTerm::constant(self.constant(s, r)?));
            }
            if !is_identifier(text) || matches!(text, "true" | "false") {
                return Err(s.error(format!("expected a term, found `{text}`")));
            }
            return Ok(LinTerm::var(self.var(text)));
        }
        let Some((head, args)) = s.as_call() else {
            return Err(s.error("expected a term"));
        };
        let terms = args.iter().map(|a| self.term(a)).collect::<PResult<Vec<_>>>()?;
        match head {
            "+" => Ok(terms.iter().fold(LinTerm::zero(), |acc, t| acc.plus(t))),
            "-" => match terms.split_first() {
                None => Err(s.error("`-` needs an argument")),
                Some((t, [])) => Ok(t.negated()),
                Some((t, rest)) => Ok(rest.iter().fold(t.clone(), |acc, u| acc.minus(u))),
            },
            "*" => {
                let mut coeff = Rational::one();
                let mut var_part: Option<LinTerm> = None;
                for t in terms {
                    if t.is_constant() {
                        coeff *= t.constant_part();
                    } else if var_part.is_some() {
                        return Err(s.error("nonlinear product"));
                    } else {
                        var_part = Some(t);
                    }
                }
                Ok(match var_part {
                    Some(t) => t.scale(&coeff),
                    None => LinTerm::constant(coeff),
                })
            }
            "/" => {
                if self.theory.is_integer() {
                    return Err(s.error("fractional constant under lia"));
                }
                let Some((t, rest)) = terms.split_first() else {
                    return Err(s.error("`/` needs arguments"));
                };
                let mut out = t.clone();
                for u in rest {
                    if !u.is_constant() || u.constant_part().is_zero() {
                        return Err(s.error("division by a variable or by zero"));
                    }
                    out = out.scale(&(Rational::one() / u.constant_part()));
                }
                Ok(out)
            }
            other => Err(s.error(format!("unknown term operator `{other}`"))),
        }
    }

    /// A relational form as a conjunction of atoms.
    fn atoms(&self, s: &Sexp) -> PResult<Vec<LaAtom>> {
        let Some((head, args)) = s.as_call() else {
            return Err(s.error("expected an arithmetic atom"));
        };
        let rel = match head {
            "<=" => Rel::Le,
            "<" => Rel::Lt,
            "=" => Rel::Eq,
            ">=" => Rel::Ge,
            ">" => Rel::Gt,
            "distinct" | "!=" => {
                let terms = args.iter().map(|a| self.term(a)).collect::<PResult<Vec<_>>>()?;
                if terms.len() < 2 {
                    return Err(s.error("`distinct` needs two arguments"));
                }
                let mut out = Vec::new();
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        out.push(LaAtom::new(&terms[i], Rel::Ne, &terms[j]));
                    }
                }
                return Ok(out);
            }
            "div" => {
                let [m, t] = args else {
                    return Err(s.error("`div` takes a modulus and a term"));
                };
                let m = m
                    .as_atom()
                    .and_then(|a| BigInt::from_str(a).ok())
                    .filter(|m| !m.is_zero())
                    .ok_or_else(|| m.error("modulus must be a nonzero integer"))?;
                let t = self.term(t)?;
                if !t.has_integer_coeffs() {
                    return Err(s.error("divisibility needs integer coefficients"));
                }
                return Ok(vec![LaAtom::divides(m, t)]);
            }
            "not" => {
                let [inner] = args else {
                    return Err(s.error("`not` takes one argument"));
                };
                let atoms = self.atoms(inner)?;
                let [a] = atoms.as_slice() else {
                    return Err(inner.error("can only negate a single atom"));
                };
                return Ok(vec![a.negate()]);
            }
            other => return Err(s.error(format!("unknown relation `{other}`"))),
        };
        let terms = args.iter().map(|a| self.term(a)).collect::<PResult<Vec<_>>>()?;
        if terms.len() < 2 {
            return Err(s.error(format!("`{head}` needs at least two arguments")));
        }
        Ok(terms.windows(2).map(|w| LaAtom::new(&w[0], rel.clone(), &w[1])).collect())
    }

    fn constraint(&self, s: &Sexp) -> PResult<Vec<LaAtom>> {
        match s.as_atom() {
            Some("true") => return Ok(Vec::new()),
            Some("false") => return Ok(vec![LaAtom::new(&LinTerm::zero(), Rel::Lt, &LinTerm::zero())]),
            _ => {}
        }
        if let Some(("and", args)) = s.as_call() {
            let mut out = Vec::new();
            for a in args {
                out.extend(self.constraint(a)?);
            }
            return Ok(out);
        }
        self.atoms(s)
    }

    fn formula(&self, s: &Sexp) -> PResult<Formula> {
        match s.as_atom() {
            Some("true") => return Ok(Formula::True),
            Some("false") => return Ok(Formula::False),
            Some(_) => return Err(s.error("expected a formula")),
            None => {}
        }
        let Some((head, args)) = s.as_call() else {
            return Err(s.error("expected a formula"));
        };
        let sub = || args.iter().map(|a| self.formula(a)).collect::<PResult<Vec<_>>>();
        match head {
            "and" => Ok(Formula::and(sub()?)),
            "or" => Ok(Formula::or(sub()?)),
            "not" => match args {
                [inner] => Ok(Formula::not(self.formula(inner)?)),
                _ => Err(s.error("`not` takes one argument")),
            },
            "=>" => match args {
                [a, b] => Ok(Formula::implies(self.formula(a)?, self.formula(b)?)),
                _ => Err(s.error("`=>` takes two arguments")),
            },
            "exists" => {
                let [vars, body] = args else {
                    return Err(s.error("`exists` takes a variable list and a body"));
                };
                let names = vars
                    .as_list()
                    .ok_or_else(|| vars.error("expected a variable list"))?
                    .iter()
                    .map(|v| v.as_atom().map(|n| self.var(n)).ok_or_else(|| v.error("expected a variable")))
                    .collect::<PResult<Vec<_>>>()?;
                let mut f = self.formula(body)?;
                for v in names.into_iter().rev() {
                    f = Formula::exists(v, f);
                }
                Ok(f)
            }
            _ => Ok(Formula::and(self.atoms(s)?.into_iter().map(Formula::atom).collect::<Vec<_>>())),
        }
    }

    fn source_atom(&self, s: &Sexp) -> PResult<SourceAtom> {
        let (name, args) = match s {
            Sexp::Atom { text, .. } => (text.as_str(), &[][..]),
            Sexp::List { items, .. } => match items.split_first() {
                Some((h, rest)) => (h.as_atom().ok_or_else(|| h.error("expected a predicate name"))?, rest),
                None => return Err(s.error("empty literal")),
            },
        };
        let pred = Symbol::new(name);
        let Some(arity) = self.sig.arity(&pred) else {
            return Err(s.error(format!("undeclared predicate `{name}`")));
        };
        if arity != args.len() {
            return Err(s.error(format!("predicate `{name}` has arity {arity}, got {} arguments", args.len())));
        }
        let args = args.iter().map(|a| self.term(a)).collect::<PResult<Vec<_>>>()?;
        Ok(SourceAtom { pred, args })
    }

    fn literal(&self, s: &Sexp) -> PResult<SourceLiteral> {
        if let Some(("not", args)) = s.as_call() {
            let [inner] = args else {
                return Err(s.error("`not` takes one argument"));
            };
            let mut l = self.literal(inner)?;
            l.positive = !l.positive;
            return Ok(l);
        }
        Ok(SourceLiteral {
            positive: true,
            atom: self.source_atom(s)?,
        })
    }

    fn fo_part(&self, s: &Sexp) -> PResult<Vec<SourceLiteral>> {
        match s.as_atom() {
            Some("false") => return Ok(Vec::new()),
            Some(_) => return Ok(vec![self.literal(s)?]),
            None => {}
        }
        match s.as_call() {
            Some(("or", args)) => args.iter().map(|a| self.literal(a)).collect(),
            Some(("=>", args)) => {
                let [body, head] = args else {
                    return Err(s.error("`=>` takes a body and a head"));
                };
                let body_lits: Vec<&Sexp> = match (body.as_atom(), body.as_call()) {
                    (Some("true"), _) => Vec::new(),
                    (_, Some(("and", xs))) => xs.iter().collect(),
                    _ => vec![body],
                };
                let mut out = Vec::new();
                for b in body_lits {
                    let mut l = self.literal(b)?;
                    l.positive = !l.positive;
                    out.push(l);
                }
                if head.as_atom() != Some("false") {
                    out.push(self.literal(head)?);
                }
                Ok(out)
            }
            _ => Ok(vec![self.literal(s)?]),
        }
    }

    /// `(clause [NAME] CONSTRAINT FO)`.
    fn clause(&self, s: &Sexp, args: &[Sexp]) -> PResult<SourceClause> {
        let (name, constraint, fo) = match args {
            [c, f] => (None, c, f),
            [n, c, f] => {
                let name = n.as_atom().filter(|t| is_identifier(t)).ok_or_else(|| n.error("expected a clause name"))?;
                (Some(name.to_string()), c, f)
            }
            _ => return Err(s.error("expected (clause [NAME] CONSTRAINT FO)")),
        };
        let literals = self.fo_part(fo)?;
        if literals.iter().filter(|l| l.positive).count() > 1 {
            return Err(fo.error("clause is not Horn: more than one positive literal"));
        }
        Ok(SourceClause {
            name,
            constraint: self.constraint(constraint)?,
            literals,
        })
    }
}

fn integer_arg(s: &Sexp) -> PResult<i64> {
    s.as_atom().and_then(|a| a.parse().ok()).ok_or_else(|| s.error("expected an integer"))
}

fn theory_of(s: &Sexp) -> PResult<Theory> {
    match s.as_atom() {
        Some("lra") => Ok(Theory::Lra),
        Some("lqa") => Ok(Theory::Lqa),
        Some("lia") => Ok(Theory::Lia),
        _ => Err(s.error("unknown theory, expected lra, lqa or lia")),
    }
}

/// Parse a problem file; reports the first error with its position.
pub fn parse(text: &str) -> Result<Problem> {
    Ok(parse_inner(text)?)
}

fn parse_inner(text: &str) -> PResult<Problem> {
    let forms = read_all(text)?;
    let mut theory = None;
    for f in &forms {
        if let Some(("theory", args)) = f.as_call() {
            let [t] = args else {
                return Err(f.error("expected (theory NAME)"));
            };
            if theory.is_some() {
                return Err(f.error("theory declared twice"));
            }
            theory = Some(theory_of(t)?);
        }
    }
    let theory = theory.ok_or_else(|| ParseError::new(1, 1, "missing (theory ...) declaration"))?;
    let mut sig = Signature::new();
    let mut precedence: Option<(Vec<Symbol>, &Sexp)> = None;
    let mut window = None;
    let mut clauses = Vec::new();
    for f in &forms {
        let Some((head, args)) = f.as_call() else {
            return Err(f.error("expected a directive"));
        };
        match head {
            "theory" => {}
            "pred" => {
                let [name, arity] = args else {
                    return Err(f.error("expected (pred NAME ARITY)"));
                };
                let n = name.as_atom().filter(|t| is_identifier(t)).ok_or_else(|| name.error("expected a predicate name"))?;
                let a = integer_arg(arity)?;
                if a < 0 {
                    return Err(arity.error("arity must be nonnegative"));
                }
                if !sig.declare(Symbol::new(n), a as usize) {
                    return Err(name.error(format!("predicate `{n}` declared twice")));
                }
            }
            "order" => {
                if precedence.is_some() {
                    return Err(f.error("order given twice"));
                }
                let syms = args
                    .iter()
                    .map(|a| a.as_atom().map(Symbol::new).ok_or_else(|| a.error("expected a predicate name")))
                    .collect::<PResult<Vec<_>>>()?;
                precedence = Some((syms, f));
            }
            "window" => {
                let [lo, hi] = args else {
                    return Err(f.error("expected (window LO HI)"));
                };
                let w = Window::new(integer_arg(lo)?, integer_arg(hi)?).map_err(|e| f.error(e.to_string()))?;
                window = Some(w);
            }
            "clause" => {
                let ctx = Ctx {
                    theory,
                    sig: &sig,
                    canonical: false,
                };
                clauses.push(ctx.clause(f, args)?);
            }
            other => return Err(f.error(format!("unknown directive `{other}`"))),
        }
    }
    let precedence = match precedence {
        None => None,
        Some((syms, f)) => {
            check_order(&syms, &sig).map_err(|m| f.error(m))?;
            Some(syms)
        }
    };
    Ok(Problem {
        theory,
        declarations: sig,
        precedence,
        clauses,
        window_hint: window,
    })
}

/// An order must list every declared predicate exactly once.
pub(crate) fn check_order(syms: &[Symbol], sig: &Signature) -> std::result::Result<(), String> {
    for (i, s) in syms.iter().enumerate() {
        if !sig.contains(s) {
            return Err(format!("undeclared predicate `{s}` in order"));
        }
        if syms[..i].contains(s) {
            return Err(format!("predicate `{s}` listed twice in order"));
        }
    }
    if let Some(missing) = sig.symbols().iter().find(|s| !syms.contains(s)) {
        return Err(format!("order does not mention `{missing}`"));
    }
    Ok(())
}

/// A single `(clause ...)` form against a known signature.
pub fn parse_clause(text: &str, sig: &Signature, theory: Theory) -> Result<SourceClause> {
    let forms = read_all(text)?;
    let [f] = forms.as_slice() else {
        return Err(Error::Parse(ParseError::new(1, 1, "expected exactly one clause")));
    };
    let ctx = Ctx {
        theory,
        sig,
        canonical: false,
    };
    match f.as_call() {
        Some(("clause", args)) => Ok(ctx.clause(f, args)?),
        _ => Err(Error::Parse(f.error("expected (clause [NAME] CONSTRAINT FO)"))),
    }
}

/// A formula in s-expression syntax; `x1, x2, …` are canonical variables.
pub fn parse_formula(text: &str, theory: Theory) -> Result<Formula> {
    let forms = read_all(text)?;
    let [f] = forms.as_slice() else {
        return Err(Error::Parse(ParseError::new(1, 1, "expected exactly one formula")));
    };
    let sig = Signature::new();
    let ctx = Ctx {
        theory,
        sig: &sig,
        canonical: true,
    };
    Ok(ctx.formula(f)?)
}

/// Read the text produced by `print_model`.
pub fn parse_model(text: &str, sig: &Signature, theory: Theory) -> Result<SymbolicInterpretation> {
    let mut s = SymbolicInterpretation::bottom(theory);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let err = |m: &str| Error::Parse(ParseError::new(i + 1, 1, m));
        let rest = line.strip_prefix("model ").ok_or_else(|| err("expected `model NAME/ARITY := FORMULA`"))?;
        let (lhs, formula) = rest.split_once(":=").ok_or_else(|| err("missing `:=`"))?;
        let (name, arity) = lhs.trim().rsplit_once('/').ok_or_else(|| err("missing arity"))?;
        let arity: usize = arity.parse().map_err(|_| err("bad arity"))?;
        let pred = Symbol::new(name);
        if sig.arity(&pred) != Some(arity) {
            return Err(err(&format!("`{name}/{arity}` is not declared")));
        }
        let f = parse_formula(formula, theory).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(ParseError::new(i + 1, p.column, p.message)),
            other => other,
        })?;
        if f.free_vars().iter().any(|v| v.canon_index().is_none_or(|k| k as usize > arity)) {
            return Err(err("formula mentions a variable outside x1..xn"));
        }
        s.set(pred, arity, f);
    }
    Ok(s)
}
