//! Minimal S-expression reader shared by every input format.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SexprError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexpr::Atom(s.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            Sexpr::Atom(_) => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Sexpr::Atom(a) if a.starts_with('?'))
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A top-level form and the line it starts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub line: usize,
    pub expr: Sexpr,
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Reader<'a> {
    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.chars.next();
                }
            } else if c.is_whitespace() {
                if c == '\n' {
                    self.line += 1;
                }
                self.chars.next();
            } else {
                break;
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> SexprError {
        SexprError {
            line: self.line,
            message: message.into(),
        }
    }

    fn read(&mut self) -> Result<Sexpr, SexprError> {
        self.skip_trivia();
        match self.chars.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(')') => Err(self.err("unbalanced `)`")),
            Some('(') => {
                self.chars.next();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(self.err("unclosed `(`")),
                        Some(')') => {
                            self.chars.next();
                            return Ok(Sexpr::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('"') => {
                self.chars.next();
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(self.err("unterminated string")),
                        Some('"') => return Ok(Sexpr::Atom(s)),
                        Some(c) => {
                            if c == '\n' {
                                self.line += 1;
                            }
                            s.push(c)
                        }
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.chars.next();
                }
                Ok(Sexpr::Atom(s))
            }
        }
    }
}

/// Reads every top-level form in `text`.
pub fn parse_forms(text: &str) -> Result<Vec<Form>, SexprError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        line: 1,
    };
    let mut forms = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.chars.peek().is_none() {
            return Ok(forms);
        }
        let line = reader.line;
        let expr = reader.read()?;
        forms.push(Form { line, expr });
    }
}

/// Reads exactly one form.
pub fn parse_one(text: &str) -> Result<Sexpr, SexprError> {
    let mut forms = parse_forms(text)?;
    match forms.len() {
        1 => Ok(forms.remove(0).expr),
        0 => Err(SexprError {
            line: 1,
            message: "empty input".into(),
        }),
        n => Err(SexprError {
            line: forms[1].line,
            message: format!("expected one expression, found {n}"),
        }),
    }
}

type Keywords<'a> = Vec<(&'a str, &'a Sexpr)>;

/// Splits `(head positional... :key value ...)` into positionals and keyword
/// arguments. Keywords are returned without the leading colon.
pub fn split_keywords(items: &[Sexpr]) -> Result<(Vec<&Sexpr>, Keywords<'_>), String> {
    let mut positional = Vec::new();
    let mut keywords = Vec::new();
    let mut iter = items.iter();
    while let Some(item) = iter.next() {
        match item.as_atom() {
            Some(k) if k.starts_with(':') && k.len() > 1 => {
                let value = iter
                    .next()
                    .ok_or_else(|| format!("keyword {k} is missing its value"))?;
                keywords.push((&k[1..], value));
            }
            _ => positional.push(item),
        }
    }
    Ok((positional, keywords))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_forms_with_lines() {
        let text = "; header\n(genls Cat Mammal)\n\n(assert :mt PeopleDataMt :time (year 1990)\n  (isa Tom Cat)) ; trailing\n";
        let forms = parse_forms(text).unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].line, 2);
        assert_eq!(forms[1].line, 4);
        assert_eq!(forms[1].expr.to_string(), "(assert :mt PeopleDataMt :time (year 1990) (isa Tom Cat))");
    }

    #[test]
    fn reports_unbalanced_input() {
        assert_eq!(parse_forms("(a (b c)\n").unwrap_err().message, "unclosed `(`");
        let err = parse_forms("(a)\n(b))").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn keyword_split() {
        let e = parse_one("(event :id W1 :type WeddingEvent extra)").unwrap();
        let (pos, kw) = split_keywords(&e.as_list().unwrap()[1..]).unwrap();
        assert_eq!(pos.len(), 1);
        assert_eq!(kw[0].0, "id");
        assert_eq!(kw[1].1.as_atom(), Some("WeddingEvent"));
        assert!(split_keywords(&parse_one("(x :dangling)").unwrap().as_list().unwrap()[1..]).is_err());
    }
}
