//! Line-oriented N-Triples parser.

use std::collections::HashMap;

use super::term::{Literal, Term, Triple};

/// Maps document blank-node labels to session-stable `b<n>` labels assigned
/// in order of first appearance.
#[derive(Debug, Default)]
pub struct BlankNodes {
    labels: HashMap<String, String>,
    next: usize,
}

impl BlankNodes {
    pub fn named(&mut self, label: &str) -> Term {
        if let Some(id) = self.labels.get(label) {
            return Term::BlankNode(id.clone());
        }
        let id = self.fresh_label();
        self.labels.insert(label.to_string(), id.clone());
        Term::BlankNode(id)
    }

    pub fn fresh(&mut self) -> Term {
        Term::BlankNode(self.fresh_label())
    }

    fn fresh_label(&mut self) -> String {
        let id = format!("b{}", self.next);
        self.next += 1;
        id
    }
}

pub(crate) fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\u{B7}')
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(got) => format!("expected '{c}', found '{got}'"),
                None => format!("expected '{c}', found end of line"),
            })
        }
    }
}

pub(crate) fn read_unicode_escape(
    mut next: impl FnMut() -> Option<char>,
    len: usize,
) -> Result<char, String> {
    let mut code = 0u32;
    for _ in 0..len {
        let d = next()
            .and_then(|c| c.to_digit(16))
            .ok_or_else(|| "invalid unicode escape".to_string())?;
        code = code * 16 + d;
    }
    char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
}

fn parse_iri(cur: &mut Cursor<'_>) -> Result<String, String> {
    cur.expect('<')?;
    let mut iri = String::new();
    loop {
        match cur.bump() {
            None => return Err("unterminated IRI".into()),
            Some('>') => break,
            Some('\\') => {
                let c = match cur.bump() {
                    Some('u') => read_unicode_escape(|| cur.bump(), 4)?,
                    Some('U') => read_unicode_escape(|| cur.bump(), 8)?,
                    _ => return Err("invalid escape in IRI".into()),
                };
                iri.push(c);
            }
            Some(c @ ('<' | '"' | '{' | '}' | '|' | '^' | '`')) => {
                return Err(format!("character '{c}' not allowed in IRI"))
            }
            Some(c) if c <= ' ' => return Err("whitespace in IRI".into()),
            Some(c) => iri.push(c),
        }
    }
    if !is_absolute_iri(&iri) {
        return Err(format!("IRI <{iri}> is not absolute"));
    }
    Ok(iri)
}

fn parse_blank(cur: &mut Cursor<'_>, blanks: &mut BlankNodes) -> Result<Term, String> {
    cur.expect('_')?;
    cur.expect(':')?;
    let start = cur.pos;
    while matches!(cur.peek(), Some(c) if is_pn_chars(c) || c == '.') {
        cur.bump();
    }
    let mut label = &cur.text[start..cur.pos];
    // a trailing '.' terminates the statement, not the label
    while let Some(stripped) = label.strip_suffix('.') {
        label = stripped;
        cur.pos -= 1;
    }
    if label.is_empty() {
        return Err("empty blank node label".into());
    }
    Ok(blanks.named(label))
}

fn parse_literal(cur: &mut Cursor<'_>) -> Result<Literal, String> {
    cur.expect('"')?;
    let mut lexical = String::new();
    loop {
        match cur.bump() {
            None => return Err("unterminated string literal".into()),
            Some('"') => break,
            Some('\\') => lexical.push(match cur.bump() {
                Some('t') => '\t',
                Some('b') => '\u{8}',
                Some('n') => '\n',
                Some('r') => '\r',
                Some('f') => '\u{c}',
                Some('"') => '"',
                Some('\'') => '\'',
                Some('\\') => '\\',
                Some('u') => read_unicode_escape(|| cur.bump(), 4)?,
                Some('U') => read_unicode_escape(|| cur.bump(), 8)?,
                _ => return Err("invalid escape in string literal".into()),
            }),
            Some('\n' | '\r') => return Err("raw newline in string literal".into()),
            Some(c) => lexical.push(c),
        }
    }
    if cur.eat('@') {
        let start = cur.pos;
        while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
            cur.bump();
        }
        let tag = &cur.text[start..cur.pos];
        if !valid_lang_tag(tag) {
            return Err(format!("invalid language tag '{tag}'"));
        }
        Ok(Literal::lang(lexical, tag))
    } else if cur.eat('^') {
        cur.expect('^')?;
        let dt = parse_iri(cur)?;
        Ok(Literal::typed(lexical, dt))
    } else {
        Ok(Literal::plain(lexical))
    }
}

pub(crate) fn valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Parses one N-Triples line. Blank lines and comment-only lines yield
/// `Ok(None)`.
pub fn parse_line(line: &str, blanks: &mut BlankNodes) -> Result<Option<Triple>, String> {
    let mut cur = Cursor { text: line, pos: 0 };
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') | Some('\r') | Some('\n') => return Ok(None),
        _ => {}
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(parse_iri(&mut cur)?),
        Some('_') => parse_blank(&mut cur, blanks)?,
        _ => return Err("subject must be an IRI or blank node".into()),
    };
    cur.skip_ws();
    if cur.peek() != Some('<') {
        return Err("predicate must be an IRI".into());
    }
    let predicate = Term::Iri(parse_iri(&mut cur)?);
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Term::Iri(parse_iri(&mut cur)?),
        Some('_') => parse_blank(&mut cur, blanks)?,
        Some('"') => Term::Literal(parse_literal(&mut cur)?),
        _ => return Err("object must be an IRI, blank node or literal".into()),
    };
    cur.skip_ws();
    cur.expect('.')?;
    cur.skip_ws();
    match cur.peek() {
        None | Some('#') | Some('\r') | Some('\n') => Ok(Some(Triple::new(subject, predicate, object))),
        Some(c) => Err(format!("unexpected '{c}' after statement")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::term::XSD_INTEGER;

    fn parse(line: &str) -> Result<Option<Triple>, String> {
        parse_line(line, &mut BlankNodes::default())
    }

    #[test]
    fn typed_literal() {
        let t = parse(r#"<http://ex/a> <http://ex/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> ."#)
            .unwrap()
            .unwrap();
        assert_eq!(t.subject, Term::iri("http://ex/a"));
        assert_eq!(t.predicate, Term::iri("http://ex/p"));
        assert_eq!(t.object, Term::Literal(Literal::typed("5", XSD_INTEGER)));
    }

    #[test]
    fn escapes_and_lang() {
        let t = parse(r#"<http://ex/a> <http://ex/p> "café \"x\""@fr-CA ."#).unwrap().unwrap();
        assert_eq!(t.object, Term::Literal(Literal::lang("café \"x\"", "fr-ca")));
    }

    #[test]
    fn blank_nodes_get_stable_ids() {
        let mut blanks = BlankNodes::default();
        let a = parse_line("_:x <http://ex/p> _:y.", &mut blanks).unwrap().unwrap();
        let b = parse_line("_:y <http://ex/p> _:x .", &mut blanks).unwrap().unwrap();
        assert_eq!(a.subject, Term::BlankNode("b0".into()));
        assert_eq!(a.object, Term::BlankNode("b1".into()));
        assert_eq!(b.subject, a.object);
    }

    #[test]
    fn comments_and_blank_lines() {
        assert_eq!(parse("").unwrap(), None);
        assert_eq!(parse("   # hello").unwrap(), None);
        assert!(parse("<http://ex/a> <http://ex/p> <http://ex/b> . # trailing").unwrap().is_some());
    }

    #[test]
    fn malformed_lines() {
        for bad in [
            "<http://ex/a> <http://ex/p> <http://ex/b>",
            "<http://ex/a> \"lit\" <http://ex/b> .",
            "\"lit\" <http://ex/p> <http://ex/b> .",
            "<http://ex/a> <http://ex/p> \"open .",
            "<relative> <http://ex/p> <http://ex/b> .",
            "<http://ex/a> <http://ex/p> <http://ex/b> . extra",
            "<http://ex/a b> <http://ex/p> <http://ex/b> .",
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
