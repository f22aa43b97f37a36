//! Minimal s-expression reader with source positions. `;` starts a line
//! comment.

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, line: usize, column: usize },
    List { items: Vec<Sexp>, line: usize, column: usize },
}

impl Sexp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, column, .. } | Sexp::List { line, column, .. } => (*line, *column),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (l, c) = self.pos();
        ParseError::new(l, c, message)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }

    /// Head symbol and arguments of a non-empty list whose head is an atom.
    pub fn as_call(&self) -> Option<(&str, &[Sexp])> {
        let items = self.as_list()?;
        let head = items.first()?.as_atom()?;
        Some((head, &items[1..]))
    }
}

pub fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut column = 0;
    let mut chars = text.chars().peekable();
    let mut token: Option<(String, usize, usize)> = None;

    fn flush(token: &mut Option<(String, usize, usize)>, stack: &mut [(Vec<Sexp>, usize, usize)], top: &mut Vec<Sexp>) {
        if let Some((text, line, column)) = token.take() {
            let atom = Sexp::Atom { text, line, column };
            match stack.last_mut() {
                Some((items, _, _)) => items.push(atom),
                None => top.push(atom),
            }
        }
    }

    while let Some(ch) = chars.next() {
        column += 1;
        match ch {
            '\n' => {
                flush(&mut token, &mut stack, &mut top);
                line += 1;
                column = 0;
            }
            ';' => {
                flush(&mut token, &mut stack, &mut top);
                while chars.peek().is_some_and(|c| *c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                flush(&mut token, &mut stack, &mut top);
                stack.push((Vec::new(), line, column));
            }
            ')' => {
                flush(&mut token, &mut stack, &mut top);
                let Some((items, l, c)) = stack.pop() else {
                    return Err(ParseError::new(line, column, "unexpected `)`"));
                };
                let list = Sexp::List { items, line: l, column: c };
                match stack.last_mut() {
                    Some((outer, _, _)) => outer.push(list),
                    None => top.push(list),
                }
            }
            c if c.is_whitespace() => flush(&mut token, &mut stack, &mut top),
            c => match &mut token {
                Some((s, _, _)) => s.push(c),
                None => token = Some((c.to_string(), line, column)),
            },
        }
    }
    flush(&mut token, &mut stack, &mut top);
    if let Some((_, l, c)) = stack.last() {
        return Err(ParseError::new(*l, *c, "unclosed `(`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let xs = read_all("; header\n(pred P 1)\n  (clause true (P x)) ; tail").unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs[0].pos(), (2, 1));
        assert_eq!(xs[1].pos(), (3, 3));
        let (head, args) = xs[1].as_call().unwrap();
        assert_eq!(head, "clause");
        assert_eq!(args[0].as_atom(), Some("true"));
        assert_eq!(args[1].pos(), (3, 16));
        assert_eq!(args[1].as_list().unwrap()[1].pos(), (3, 19));
    }

    #[test]
    fn unbalanced() {
        assert_eq!(read_all("(a (b)").unwrap_err().column, 1);
        assert_eq!(read_all("a)").unwrap_err(), ParseError::new(1, 2, "unexpected `)`"));
    }
}
