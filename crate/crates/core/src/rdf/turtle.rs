//! Streaming parser for the common Turtle subset: `@prefix`/`PREFIX`,
//! `@base`/`BASE`, prefixed names, `a`, predicate and object lists,
//! `[ ... ]` blank node property lists, typed/language/numeric/boolean
//! literals and long strings. Collections and quoted triples are rejected.

use std::collections::HashMap;
use std::io::BufRead;

use super::ntriples::{is_absolute_iri, is_pn_chars, read_unicode_escape, valid_lang_tag, BlankNodes};
use super::term::{Literal, Term, Triple, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    PName(String, String),
    Blank(String),
    Str(String),
    LangTag(String),
    DataType,
    Integer(String),
    Decimal(String),
    Double(String),
    Bool(bool),
    A,
    Dot,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    Prefix { sparql: bool },
    Base { sparql: bool },
    Eof,
}

#[derive(Debug)]
pub enum TurtleError {
    Io(std::io::Error),
    Syntax { line: usize, message: String },
}

type Res<T> = Result<T, TurtleError>;

struct Lexer<R> {
    reader: R,
    line: Vec<char>,
    pos: usize,
    line_no: usize,
    eof: bool,
}

impl<R: BufRead> Lexer<R> {
    fn new(reader: R) -> Self {
        Lexer {
            reader,
            line: Vec::new(),
            pos: 0,
            line_no: 0,
            eof: false,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Res<T> {
        Err(TurtleError::Syntax {
            line: self.line_no,
            message: message.into(),
        })
    }

    /// Ensures the current line has unread input; false at end of file.
    fn fill(&mut self) -> Res<bool> {
        while self.pos >= self.line.len() {
            if self.eof {
                return Ok(false);
            }
            let mut buf = String::new();
            let n = self.reader.read_line(&mut buf).map_err(TurtleError::Io)?;
            if n == 0 {
                self.eof = true;
                return Ok(false);
            }
            self.line = buf.chars().collect();
            self.pos = 0;
            self.line_no += 1;
        }
        Ok(true)
    }

    fn peek(&self) -> Option<char> {
        self.line.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.line.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    /// Like `bump`, but continues onto following lines.
    fn bump_multiline(&mut self) -> Res<Option<char>> {
        if !self.fill()? {
            return Ok(None);
        }
        Ok(self.bump())
    }

    fn skip_line(&mut self) {
        self.pos = self.line.len();
    }

    fn skip_ws_and_comments(&mut self) -> Res<()> {
        loop {
            if !self.fill()? {
                return Ok(());
            }
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('#') => self.skip_line(),
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Res<(Tok, usize)> {
        self.skip_ws_and_comments()?;
        let line = self.line_no;
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, line));
        };
        let tok = match c {
            '<' => self.iri()?,
            '"' | '\'' => self.string(c)?,
            '@' => {
                self.bump();
                let mut word = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    word.push(c);
                    self.bump();
                }
                match word.as_str() {
                    "prefix" => Tok::Prefix { sparql: false },
                    "base" => Tok::Base { sparql: false },
                    _ if valid_lang_tag(&word) => Tok::LangTag(word),
                    _ => return self.err(format!("invalid language tag or directive '@{word}'")),
                }
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return self.err("expected '^^'");
                }
                Tok::DataType
            }
            '.' if !self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                self.bump();
                Tok::Dot
            }
            ';' => {
                self.bump();
                Tok::Semi
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '[' => {
                self.bump();
                Tok::LBracket
            }
            ']' => {
                self.bump();
                Tok::RBracket
            }
            '(' => {
                self.bump();
                Tok::LParen
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.pos += 2;
                let label = self.name_chars();
                if label.is_empty() {
                    return self.err("empty blank node label");
                }
                Tok::Blank(label)
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.number()?,
            c if c.is_alphabetic() || c == '_' || c == ':' => self.word()?,
            other => {
                self.bump();
                return self.err(format!("unexpected character '{other}'"));
            }
        };
        Ok((tok, line))
    }

    fn name_chars(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == '.' || c == ':' || c == '%' {
                out.push(c);
                self.bump();
            } else if c == '\\' && self.peek_at(1).is_some() {
                self.bump();
                out.push(self.bump().unwrap_or('\\'));
            } else {
                break;
            }
        }
        while out.ends_with('.') {
            out.pop();
            self.pos -= 1;
        }
        out
    }

    fn word(&mut self) -> Res<Tok> {
        let word = self.name_chars();
        if let Some(idx) = word.find(':') {
            let (prefix, local) = word.split_at(idx);
            return Ok(Tok::PName(prefix.to_string(), local[1..].to_string()));
        }
        Ok(match word.as_str() {
            "a" => Tok::A,
            "true" => Tok::Bool(true),
            "false" => Tok::Bool(false),
            w if w.eq_ignore_ascii_case("prefix") => Tok::Prefix { sparql: true },
            w if w.eq_ignore_ascii_case("base") => Tok::Base { sparql: true },
            w => return self.err(format!("unexpected bare word '{w}'")),
        })
    }

    fn number(&mut self) -> Res<Tok> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let digits = |lx: &mut Self, text: &mut String| {
            let mut n = 0;
            while let Some(c) = lx.peek().filter(char::is_ascii_digit) {
                text.push(c);
                lx.bump();
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut text);
        let mut frac_digits = 0;
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            text.push('.');
            self.bump();
            frac_digits = digits(self, &mut text);
        }
        if int_digits + frac_digits == 0 {
            return self.err("malformed number");
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.bump();
            }
            if digits(self, &mut text) == 0 {
                return self.err("malformed exponent");
            }
            return Ok(Tok::Double(text));
        }
        Ok(if decimal { Tok::Decimal(text) } else { Tok::Integer(text) })
    }

    fn iri(&mut self) -> Res<Tok> {
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated IRI"),
                Some('>') => return Ok(Tok::Iri(iri)),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => read_unicode_escape(|| self.bump(), 4),
                        Some('U') => read_unicode_escape(|| self.bump(), 8),
                        _ => Err("invalid escape in IRI".to_string()),
                    };
                    match c {
                        Ok(c) => iri.push(c),
                        Err(e) => return self.err(e),
                    }
                }
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return self.err(format!("character {c:?} not allowed in IRI"))
                }
                Some(c) => iri.push(c),
            }
        }
    }

    fn string(&mut self, quote: char) -> Res<Tok> {
        let long = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.pos += if long { 3 } else { 1 };
        let mut out = String::new();
        loop {
            let c = if long { self.bump_multiline()? } else { self.bump() };
            match c {
                None => return self.err("unterminated string literal"),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.pos += 2;
                        // """a"""" ends with a quote inside the literal
                        while self.peek() == Some(quote) {
                            out.push(quote);
                            self.bump();
                        }
                        break;
                    }
                    out.push(c);
                }
                Some('\\') => {
                    let esc = match self.bump() {
                        Some('t') => Ok('\t'),
                        Some('b') => Ok('\u{8}'),
                        Some('n') => Ok('\n'),
                        Some('r') => Ok('\r'),
                        Some('f') => Ok('\u{c}'),
                        Some('"') => Ok('"'),
                        Some('\'') => Ok('\''),
                        Some('\\') => Ok('\\'),
                        Some('u') => read_unicode_escape(|| self.bump(), 4),
                        Some('U') => read_unicode_escape(|| self.bump(), 8),
                        _ => Err("invalid string escape".to_string()),
                    };
                    match esc {
                        Ok(c) => out.push(c),
                        Err(e) => return self.err(e),
                    }
                }
                Some('\n' | '\r') if !long => return self.err("newline in short string literal"),
                Some(c) => out.push(c),
            }
        }
        Ok(Tok::Str(out))
    }
}

pub struct TurtleParser<R> {
    lexer: Lexer<R>,
    peeked: Option<(Tok, usize)>,
    prefixes: HashMap<String, String>,
    base: Option<url::Url>,
    blanks: BlankNodes,
    pending: Vec<Triple>,
}

impl<R: BufRead> TurtleParser<R> {
    pub fn new(reader: R) -> Self {
        TurtleParser {
            lexer: Lexer::new(reader),
            peeked: None,
            prefixes: HashMap::new(),
            base: None,
            blanks: BlankNodes::default(),
            pending: Vec::new(),
        }
    }

    fn next(&mut self) -> Res<(Tok, usize)> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn peek(&mut self) -> Res<&Tok> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(&self.peeked.as_ref().expect("peeked").0)
    }

    fn syntax<T>(line: usize, message: impl Into<String>) -> Res<T> {
        Err(TurtleError::Syntax {
            line,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Res<()> {
        let (tok, line) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Self::syntax(line, format!("expected {what}, found {tok:?}"))
        }
    }

    fn resolve(&self, iri: String, line: usize) -> Res<String> {
        if is_absolute_iri(&iri) {
            return Ok(iri);
        }
        match &self.base {
            Some(base) => base
                .join(&iri)
                .map(String::from)
                .or_else(|e| Self::syntax(line, format!("cannot resolve <{iri}>: {e}"))),
            None => Self::syntax(line, format!("relative IRI <{iri}> without @base")),
        }
    }

    fn expand(&self, prefix: &str, local: &str, line: usize) -> Res<String> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Self::syntax(line, format!("undefined prefix '{prefix}:'")),
        }
    }

    /// Parses the next statement. Returns `Ok(false)` at end of input; the
    /// triples of a successful statement are appended to `out`.
    pub fn next_statement(&mut self, out: &mut Vec<Triple>) -> Res<bool> {
        self.pending.clear();
        let (tok, line) = self.next()?;
        match tok {
            Tok::Eof => return Ok(false),
            Tok::Prefix { sparql } => {
                let (name, l) = self.next()?;
                let Tok::PName(prefix, local) = name else {
                    return Self::syntax(l, "expected prefix name");
                };
                if !local.is_empty() {
                    return Self::syntax(l, "prefix declaration must end with ':'");
                }
                let (iri, l) = self.next()?;
                let Tok::Iri(iri) = iri else {
                    return Self::syntax(l, "expected namespace IRI");
                };
                let iri = self.resolve(iri, l)?;
                if !sparql {
                    self.expect(Tok::Dot, "'.'")?;
                }
                self.prefixes.insert(prefix, iri);
            }
            Tok::Base { sparql } => {
                let (iri, l) = self.next()?;
                let Tok::Iri(iri) = iri else {
                    return Self::syntax(l, "expected base IRI");
                };
                let iri = self.resolve(iri, l)?;
                let url = url::Url::parse(&iri).or_else(|e| Self::syntax(l, format!("bad base IRI: {e}")))?;
                if !sparql {
                    self.expect(Tok::Dot, "'.'")?;
                }
                self.base = Some(url);
            }
            tok => {
                self.peeked = Some((tok, line));
                self.triples()?;
                self.expect(Tok::Dot, "'.' at end of statement")?;
                out.append(&mut self.pending);
            }
        }
        Ok(true)
    }

    /// Skips to the end of the current statement after an error.
    pub fn recover(&mut self) -> Res<()> {
        self.pending.clear();
        let mut depth = 0usize;
        loop {
            match self.next() {
                Ok((Tok::Eof, _)) => return Ok(()),
                Ok((Tok::Dot, _)) if depth == 0 => return Ok(()),
                Ok((Tok::LBracket, _)) => depth += 1,
                Ok((Tok::RBracket, _)) => depth = depth.saturating_sub(1),
                Ok(_) => {}
                Err(TurtleError::Io(e)) => return Err(TurtleError::Io(e)),
                Err(TurtleError::Syntax { .. }) => {
                    // an unreadable token ends the damaged statement
                    self.lexer.skip_line();
                    return Ok(());
                }
            }
        }
    }

    fn triples(&mut self) -> Res<()> {
        let (tok, line) = self.next()?;
        let subject = match tok {
            Tok::LBracket => {
                let node = self.blank_property_list()?;
                if matches!(self.peek()?, Tok::Dot) {
                    return Ok(());
                }
                node
            }
            Tok::Iri(iri) => Term::Iri(self.resolve(iri, line)?),
            Tok::PName(p, l) => Term::Iri(self.expand(&p, &l, line)?),
            Tok::Blank(label) => self.blanks.named(&label),
            Tok::LParen => return Self::syntax(line, "collections are not supported"),
            other => return Self::syntax(line, format!("unexpected {other:?} as subject")),
        };
        self.predicate_object_list(&subject)
    }

    /// Called after '[' has been consumed.
    fn blank_property_list(&mut self) -> Res<Term> {
        let node = self.blanks.fresh();
        if matches!(self.peek()?, Tok::RBracket) {
            self.next()?;
            return Ok(node);
        }
        self.predicate_object_list(&node)?;
        self.expect(Tok::RBracket, "']'")?;
        Ok(node)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Res<()> {
        loop {
            let (tok, line) = self.next()?;
            let predicate = match tok {
                Tok::A => Term::iri(RDF_TYPE),
                Tok::Iri(iri) => Term::Iri(self.resolve(iri, line)?),
                Tok::PName(p, l) => Term::Iri(self.expand(&p, &l, line)?),
                other => return Self::syntax(line, format!("unexpected {other:?} as predicate")),
            };
            loop {
                let object = self.object()?;
                self.pending.push(Triple::new(subject.clone(), predicate.clone(), object));
                if matches!(self.peek()?, Tok::Comma) {
                    self.next()?;
                } else {
                    break;
                }
            }
            if !matches!(self.peek()?, Tok::Semi) {
                return Ok(());
            }
            while matches!(self.peek()?, Tok::Semi) {
                self.next()?;
            }
            if matches!(self.peek()?, Tok::Dot | Tok::RBracket) {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Res<Term> {
        let (tok, line) = self.next()?;
        Ok(match tok {
            Tok::Iri(iri) => Term::Iri(self.resolve(iri, line)?),
            Tok::PName(p, l) => Term::Iri(self.expand(&p, &l, line)?),
            Tok::Blank(label) => self.blanks.named(&label),
            Tok::LBracket => self.blank_property_list()?,
            Tok::Integer(v) => Term::Literal(Literal::typed(v, XSD_INTEGER)),
            Tok::Decimal(v) => Term::Literal(Literal::typed(v, XSD_DECIMAL)),
            Tok::Double(v) => Term::Literal(Literal::typed(v, XSD_DOUBLE)),
            Tok::Bool(b) => Term::Literal(Literal::typed(b.to_string(), XSD_BOOLEAN)),
            Tok::Str(s) => match self.peek()? {
                Tok::LangTag(_) => {
                    let Ok((Tok::LangTag(tag), _)) = self.next() else { unreachable!() };
                    Term::Literal(Literal::lang(s, tag))
                }
                Tok::DataType => {
                    self.next()?;
                    let (dt, l) = self.next()?;
                    let dt = match dt {
                        Tok::Iri(iri) => self.resolve(iri, l)?,
                        Tok::PName(p, loc) => self.expand(&p, &loc, l)?,
                        other => return Self::syntax(l, format!("expected datatype IRI, found {other:?}")),
                    };
                    Term::Literal(Literal::typed(s, dt))
                }
                _ => Term::Literal(Literal::plain(s)),
            },
            Tok::LParen => return Self::syntax(line, "collections are not supported"),
            other => return Self::syntax(line, format!("unexpected {other:?} as object")),
        })
    }
}
