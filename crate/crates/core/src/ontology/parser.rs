//! Line-oriented text format for ALC ontologies.
//!
//! Grammar (one axiom or declaration per line, `#` starts a comment):
//!
//! ```text
//! line  := decl | axiom
//! decl  := ("concept" | "relation" | "individual") NAME
//! axiom := expr "SubClassOf" expr
//!        | NAME ":" expr
//!        | NAME "(" NAME "," NAME ")"
//! expr  := "Thing" | "Nothing" | NAME
//!        | "not" expr
//!        | "(" expr ("and" | "or") expr ")"
//!        | ("some" | "only") NAME "." expr
//! ```
//!
//! Binary connectives are always parenthesized, `not` binds tightest, and
//! identifiers match `[A-Za-z_][A-Za-z0-9_]*` minus the reserved words above.
//! Signatures are inferred from declarations plus usage; in strict mode every
//! used symbol must also be declared.

use super::{Axiom, ConceptDescription, Ontology, Signature, SymbolKind};
use std::collections::HashMap;
use thiserror::Error;

/// Words that cannot be used as identifiers.
const RESERVED: [&str; 11] = [
    "Thing", "Nothing", "not", "and", "or", "some", "only", "SubClassOf", "concept", "relation",
    "individual",
];

/// Parse failures, with 1-based line and column positions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: `{name}` is used as {second} but line {first_line} uses it as {first}")]
    KindClash {
        line: usize,
        name: String,
        second: SymbolKind,
        first_line: usize,
        first: SymbolKind,
    },
    #[error("line {line}: undeclared symbol `{name}` (strict mode)")]
    Undeclared { line: usize, name: String },
}

/// Options for [`parse_ontology_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Reject symbols that are used without a declaration line.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push((Tok::LParen, col));
            }
            ')' => {
                chars.next();
                tokens.push((Tok::RParen, col));
            }
            ':' => {
                chars.next();
                tokens.push((Tok::Colon, col));
            }
            ',' => {
                chars.next();
                tokens.push((Tok::Comma, col));
            }
            '.' => {
                chars.next();
                tokens.push((Tok::Dot, col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut end = i + c.len_utf8();
                chars.next();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Tok::Ident(line[start..end].to_string()), col));
            }
            other => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

struct LineParser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    line_no: usize,
    line_len: usize,
}

/// One successfully parsed line.
enum Parsed {
    Decl(SymbolKind, String),
    Axiom(Axiom),
}

impl LineParser {
    fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line_no, col, message: message.into() }
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let col = self.tokens.get(self.pos).map(|&(_, c)| c).unwrap_or(self.line_len + 1);
        self.err(col, message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok, context: &str) -> Result<usize, ParseError> {
        match self.next() {
            Some((t, col)) if &t == want => Ok(col),
            Some((t, col)) => Err(self.err(
                col,
                format!("expected {} {context}, found {}", want.describe(), t.describe()),
            )),
            None => Err(self.err(
                self.line_len + 1,
                format!("expected {} {context}, found end of line", want.describe()),
            )),
        }
    }

    /// Consumes an identifier that is not a reserved word.
    fn expect_name(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        match self.next() {
            Some((Tok::Ident(s), col)) if !is_reserved(&s) => Ok((s, col)),
            Some((Tok::Ident(s), col)) => {
                Err(self.err(col, format!("reserved word `{s}` cannot name {what}")))
            }
            Some((t, col)) => Err(self.err(col, format!("expected {what} name, found {}", t.describe()))),
            None => Err(self.err(self.line_len + 1, format!("expected {what} name, found end of line"))),
        }
    }

    fn parse_expr(&mut self) -> Result<ConceptDescription, ParseError> {
        match self.next() {
            Some((Tok::Ident(word), col)) => match word.as_str() {
                "Thing" => Ok(ConceptDescription::Top),
                "Nothing" => Ok(ConceptDescription::Bottom),
                "not" => Ok(ConceptDescription::not(self.parse_expr()?)),
                "some" | "only" => {
                    let (rel, _) = self.expect_name("relation")?;
                    self.expect(&Tok::Dot, "after the relation of a restriction")?;
                    let body = self.parse_expr()?;
                    Ok(if word == "some" {
                        ConceptDescription::exists(rel, body)
                    } else {
                        ConceptDescription::forall(rel, body)
                    })
                }
                w if is_reserved(w) => {
                    Err(self.err(col, format!("expected concept expression, found `{w}`")))
                }
                _ => Ok(ConceptDescription::Name(word)),
            },
            Some((Tok::LParen, _)) => {
                let left = self.parse_expr()?;
                let op = match self.next() {
                    Some((Tok::Ident(op), _)) if op == "and" || op == "or" => op,
                    Some((t, col)) => {
                        return Err(self.err(
                            col,
                            format!("expected `and` or `or` inside parentheses, found {}", t.describe()),
                        ))
                    }
                    None => {
                        return Err(self.err_here("expected `and` or `or` inside parentheses, found end of line"))
                    }
                };
                let right = self.parse_expr()?;
                self.expect(&Tok::RParen, "to close the connective")?;
                Ok(if op == "and" {
                    ConceptDescription::and(left, right)
                } else {
                    ConceptDescription::or(left, right)
                })
            }
            Some((t, col)) =>

                Err(self.err(col, format!("expected concept expression, found {}", t.describe()))),
            None => Err(self.err_here("expected concept expression, found end of line")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if let Some((t, col)) = self.tokens.get(self.pos) {
            return Err(self.err(*col, format!("unexpected trailing {}", t.describe())));
        }
        Ok(())
    }

    fn parse_line(&mut self) -> Result<Parsed, ParseError> {
        // Declarations start with one of the reserved kind words.
        if let Some(Tok::Ident(w)) = self.peek() {
            let kind = match w.as_str() {
                "concept" => Some(SymbolKind::Concept),
                "relation" => Some(SymbolKind::Relation),
                "individual" => Some(SymbolKind::Individual),
                _ => None,
            };
            if let Some(kind) = kind {
                self.next();
                let (name, _) = self.expect_name("the declared symbol")?;
                self.finish()?;
                return Ok(Parsed::Decl(kind, name));
            }
        }
        // `name(` is a role assertion, `name :` a concept assertion;
        // everything else must be a subsumption.
        if let (Some(Tok::Ident(w)), second) = (self.peek(), self.peek_at(1)) {
            if !is_reserved(w) {
                match second {
                    Some(Tok::LParen) => {
                        let (relation, _) = self.expect_name("relation")?;
                        self.expect(&Tok::LParen, "after the relation name")?;
                        let (subject, _) = self.expect_name("individual")?;
                        self.expect(&Tok::Comma, "between the two individuals")?;
                        let (object, _) = self.expect_name("individual")?;
                        self.expect(&Tok::RParen, "to close the role assertion")?;
                        self.finish()?;
                        return Ok(Parsed::Axiom(Axiom::RoleAssertion { relation, subject, object }));
                    }
                    Some(Tok::Colon) => {
                        let (individual, _) = self.expect_name("individual")?;
                        self.expect(&Tok::Colon, "after the individual name")?;
                        let concept = self.parse_expr()?;
                        self.finish()?;
                        return Ok(Parsed::Axiom(Axiom::ConceptAssertion { individual, concept }));
                    }
                    _ => {}
                }
            }
        }
        let sub = self.parse_expr()?;
        match self.next() {
            Some((Tok::Ident(w), _)) if w == "SubClassOf" => {}
            Some((t, col)) => {
                return Err(self.err(col, format!("expected `SubClassOf`, found {}", t.describe())))
            }
            None => return Err(self.err_here("expected `SubClassOf`, found end of line")),
        }
        let sup = self.parse_expr()?;
        self.finish()?;
        Ok(Parsed::Axiom(Axiom::Subsumption { sub, sup }))
    }
}

/// Tracks first-use lines so kind clashes can cite both locations.
struct SymbolLedger {
    first_seen: HashMap<String, (SymbolKind, usize)>,
    declared: HashMap<String, SymbolKind>,
}

impl SymbolLedger {
    fn new() -> Self {
        SymbolLedger { first_seen: HashMap::new(), declared: HashMap::new() }
    }

    fn note(&mut self, kind: SymbolKind, name: &str, line: usize) -> Result<(), ParseError> {
        match self.first_seen.get(name) {
            Some(&(first, first_line)) if first != kind => Err(ParseError::KindClash {
                line,
                name: name.to_string(),
                second: kind,
                first_line,
                first,
            }),
            Some(_) => Ok(()),
            None => {
                self.first_seen.insert(name.to_string(), (kind, line));
                Ok(())
            }
        }
    }
}

/// Parses an ontology with default options (lenient symbol handling).
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    parse_ontology_with(text, ParseOptions::default())
}

/// Parses an ontology from the native line format.
pub fn parse_ontology_with(text: &str, options: ParseOptions) -> Result<Ontology, ParseError> {
    let mut ledger = SymbolLedger::new();
    let mut signature = Signature::default();
    let mut axioms: Vec<(Axiom, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let mut parser =
            LineParser { tokens, pos: 0, line_no, line_len: raw.chars().count() };
        match parser.parse_line()? {
            Parsed::Decl(kind, name) => {
                ledger.note(kind, &name, line_no)?;
                ledger.declared.insert(name.clone(), kind);
                // Kind disjointness was just checked, so this cannot fail.
                signature.note(kind, &name).expect("ledger enforces disjointness");
            }
            Parsed::Axiom(axiom) => {
                super::visit_axiom_symbols(&axiom, &mut |kind, name| {
                    ledger.note(kind, name, line_no)?;
                    if options.strict && !ledger.declared.contains_key(name) {
                        return Err(ParseError::Undeclared { line: line_no, name: name.to_string() });
                    }
                    Ok(())
                })?;
                axioms.push((axiom, line_no));
            }
        }
    }
    let ontology = Ontology::with_declared(signature, axioms.into_iter().map(|(a, _)| a).collect())
        .expect("ledger enforces disjointness");
    Ok(ontology)
}

/// Parses a single axiom line (used for query files and tests).
pub fn parse_axiom(line: &str) -> Result<Axiom, ParseError> {
    let tokens = tokenize(line, 1)?;
    if tokens.is_empty() {
        return Err(ParseError::Syntax { line: 1, col: 1, message: "empty axiom".into() });
    }
    let mut parser = LineParser { tokens, pos: 0, line_no: 1, line_len: line.chars().count() };
    match parser.parse_line()? {
        Parsed::Axiom(axiom) => Ok(axiom),
        Parsed::Decl(..) => Err(ParseError::Syntax {
            line: 1,
            col: 1,
            message: "expected an axiom, found a declaration".into(),
        }),
    }
}

/// Parses a single concept expression (used for CLI arguments).
pub fn parse_concept(text: &str) -> Result<ConceptDescription, ParseError> {
    let tokens = tokenize(text, 1)?;
    if tokens.is_empty() {
        return Err(ParseError::Syntax { line: 1, col: 1, message: "empty concept expression".into() });
    }
    let mut parser = LineParser { tokens, pos: 0, line_no: 1, line_len: text.chars().count() };
    let expr = parser.parse_expr()?;
    parser.finish()?;
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{free_symbols, NameSet};
    use proptest::prelude::*;

    #[test]
    fn parses_each_axiom_form() {
        let text = "\
# taxonomy fragment
A SubClassOf B
(A and not B) SubClassOf Nothing
alice : (A or some r.B)
r(alice, bob)
";
        let o = parse_ontology(text).unwrap();
        assert_eq!(o.tbox.len(), 2);
        assert_eq!(o.abox.len(), 2);
        assert_eq!(o.signature.concepts.len(), 2);
        assert_eq!(o.signature.relations.len(), 1);
        assert_eq!(o.signature.individuals.len(), 2);
    }

    #[test]
    fn not_binds_tighter_than_connectives() {
        let axiom = parse_axiom("(not A and B) SubClassOf only r.not B").unwrap();
        let Axiom::Subsumption { sub, sup } = axiom else { panic!("expected subsumption") };
        assert_eq!(
            sub,
            ConceptDescription::and(
                ConceptDescription::not(ConceptDescription::name("A")),
                ConceptDescription::name("B")
            )
        );
        assert_eq!(
            sup,
            ConceptDescription::forall(
                "r",
                ConceptDescription::not(ConceptDescription::name("B"))
            )
        );
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_ontology("A SubClassOf B\nA EquivalentTo B\n").unwrap_err();
        match err {
            ParseError::Syntax { line, col, ref message } => {
                assert_eq!(line, 2);
                assert_eq!(col, 3);
                assert!(message.contains("SubClassOf"), "message was: {message}");
                assert!(message.contains("EquivalentTo"), "message was: {message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unparenthesized_connective_is_an_error() {
        let err = parse_ontology("A and B SubClassOf C\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
    }

    #[test]
    fn kind_clash_cites_both_lines() {
        let err = parse_ontology("A SubClassOf some B.Thing\nB SubClassOf A\n").unwrap_err();
        match err {
            ParseError::KindClash { line, ref name, first_line, .. } => {
                assert_eq!((line, first_line), (2, 1));
                assert_eq!(name, "B");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn strict_mode_requires_declarations() {
        let text = "concept A\nconcept B\nA SubClassOf B\n";
        assert!(parse_ontology_with(text, ParseOptions { strict: true }).is_ok());
        let missing = "concept A\nA SubClassOf B\n";
        let err = parse_ontology_with(missing, ParseOptions { strict: true }).unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { line: 2, ref name } if name == "B"));
        // Lenient mode infers B from usage.
        assert!(parse_ontology(missing).is_ok());
    }

    #[test]
    fn reserved_words_cannot_name_symbols() {
        assert!(parse_ontology("not SubClassOf A\n").is_err());
        assert!(parse_ontology("a : some and.Thing\n").is_err());
        assert!(parse_ontology("concept SubClassOf\n").is_err());
    }

    // Strategy for arbitrary concept descriptions over a tiny signature.
    fn concept_strategy() -> impl Strategy<Value = ConceptDescription> {
        let leaf = prop_oneof![
            Just(ConceptDescription::Top),
            Just(ConceptDescription::Bottom),
            prop_oneof![Just("A"), Just("B"), Just("C")].prop_map(ConceptDescription::name),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(ConceptDescription::not),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ConceptDescription::and(a, b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ConceptDescription::or(a, b)),
                (prop_oneof![Just("r"), Just("s")], inner.clone())
                    .prop_map(|(r, c)| ConceptDescription::exists(r, c)),
                (prop_oneof![Just("r"), Just("s")], inner)
                    .prop_map(|(r, c)| ConceptDescription::forall(r, c)),
            ]
        })
    }

    fn axiom_strategy() -> impl Strategy<Value = Axiom> {
        let ind = prop_oneof![Just("a"), Just("b"), Just("c")];
        prop_oneof![
            (concept_strategy(), concept_strategy())
                .prop_map(|(sub, sup)| Axiom::Subsumption { sub, sup }),
            (ind.clone(), concept_strategy()).prop_map(|(i, concept)| Axiom::ConceptAssertion {
                individual: i.to_string(),
                concept,
            }),
            (prop_oneof![Just("r"), Just("s")], ind.clone(), ind).prop_map(|(r, s, o)| {
                Axiom::RoleAssertion {
                    relation: r.to_string(),
                    subject: s.to_string(),
                    object: o.to_string(),
                }
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn parse_inverts_render(axioms in proptest::collection::vec(axiom_strategy(), 0..12)) {
            let ontology = Ontology::from_axioms(axioms).unwrap();
            let text = ontology.render();
            let reparsed = parse_ontology(&text).unwrap();
            prop_assert_eq!(reparsed, ontology);
        }

        #[test]
        fn concept_text_round_trips(c in concept_strategy()) {
            let text = c.to_string();
            let back = parse_concept(&text).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn free_symbols_are_a_subset_of_parsed_signature(c in concept_strategy()) {
            let axiom = Axiom::Subsumption { sub: c.clone(), sup: ConceptDescription::Top };
            let o = Ontology::from_axioms(vec![axiom]).unwrap();
            let (concepts, relations) = free_symbols(&c);
            let have: NameSet = o.signature.concepts.clone();
            for name in concepts {
                prop_assert!(have.contains(&name));
            }
            for name in relations {
                prop_assert!(o.signature.relations.contains(&name));
            }
        }
    }
}
