//! Tokenizer for the supported Java subset.

use super::ExtractError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Keyword(&'static str),
    Int(String),
    Long(String),
    Float(String),
    Double(String),
    Char(String),
    Str(String),
    /// Operator or separator. `>` is always emitted alone so that nested
    /// generic closers can be split; the parser re-joins shift operators
    /// using [`Token::joined`].
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
    /// True when the next token starts immediately after this one.
    pub joined: bool,
}

impl Token {
    pub fn text(&self) -> String {
        match &self.tok {
            Tok::Ident(s) | Tok::Int(s) | Tok::Long(s) | Tok::Float(s) | Tok::Double(s) => {
                s.clone()
            }
            Tok::Char(s) => format!("'{s}'"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Keyword(k) | Tok::Punct(k) => (*k).to_string(),
            Tok::Eof => "<end of input>".to_string(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

// Longest first so that maximal munch works by prefix test.
const PUNCTS: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=", ">",
    "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn keyword(word: &str) -> Option<&'static str> {
    KEYWORDS.iter().copied().find(|k| *k == word)
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn error(&self, line: u32, column: u32, message: impl Into<String>) -> ExtractError {
        ExtractError::UnparsableSource {
            line,
            column,
            message: message.into(),
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ExtractError> {
    let mut cur = Cursor::new(src);
    let mut tokens: Vec<Token> = Vec::new();
    loop {
        let before = cur.pos;
        skip_trivia(&mut cur)?;
        if cur.pos != before {
            if let Some(last) = tokens.last_mut() {
                last.joined = false;
            }
        }
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek() else {
            if let Some(last) = tokens.last_mut() {
                last.joined = false;
            }
            tokens.push(Token {
                tok: Tok::Eof,
                line,
                column,
                joined: false,
            });
            return Ok(tokens);
        };
        let tok = if c.is_alphabetic() || c == '_' || c == '$' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_alphanumeric() || c == '_' || c == '$' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            match keyword(&word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            number(&mut cur)?
        } else if c == '"' {
            if cur.starts_with("\"\"\"") {
                text_block(&mut cur, line, column)?
            } else {
                quoted(&mut cur, '"', line, column).map(Tok::Str)?
            }
        } else if c == '\'' {
            quoted(&mut cur, '\'', line, column).map(Tok::Char)?
        } else if let Some(p) = PUNCTS.iter().copied().find(|p| cur.starts_with(p)) {
            for _ in 0..p.chars().count() {
                cur.bump();
            }
            Tok::Punct(p)
        } else {
            return Err(cur.error(line, column, format!("unexpected character `{c}`")));
        };
        tokens.push(Token {
            tok,
            line,
            column,
            joined: true,
        });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), ExtractError> {
    loop {
        match cur.peek() {
            Some(c) if c.is_whitespace() || c == '\u{feff}' => {
                cur.bump();
            }
            Some('/') if cur.peek_at(1) == Some('/') => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            Some('/') if cur.peek_at(1) == Some('*') => {
                let (line, column) = (cur.line, cur.column);
                cur.bump();
                cur.bump();
                loop {
                    if cur.starts_with("*/") {
                        cur.bump();
                        cur.bump();
                        break;
                    }
                    if cur.bump().is_none() {
                        return Err(cur.error(line, column, "unterminated block comment"));
                    }
                }
            }
            _ => return Ok(()),
        }
    }
}

fn number(cur: &mut Cursor<'_>) -> Result<Tok, ExtractError> {
    let (line, column) = (cur.line, cur.column);
    let mut text = String::new();
    let radix_prefix = cur.peek() == Some('0')
        && matches!(cur.peek_at(1), Some('x' | 'X' | 'b' | 'B'));
    if radix_prefix {
        text.push(cur.bump().unwrap_or('0'));
        text.push(cur.bump().unwrap_or('x'));
        while let Some(c) = cur.peek() {
            if c.is_ascii_hexdigit() || c == '_' {
                text.push(c);
                cur.bump();
            } else {
                break;
            }
        }
        if text.len() == 2 {
            return Err(cur.error(line, column, "malformed numeric literal"));
        }
        return Ok(match cur.peek() {
            Some('l' | 'L') => {
                cur.bump();
                Tok::Long(text)
            }
            _ => Tok::Int(text),
        });
    }
    let mut is_float = false;
    while let Some(c) = cur.peek() {
        if c.is_ascii_digit() || c == '_' {
            text.push(c);
            cur.bump();
        } else if c == '.' && !is_float && cur.peek_at(1).is_none_or(|d| d.is_ascii_digit() || !d.is_alphabetic() && d != '.') {
            is_float = true;
            text.push(c);
            cur.bump();
        } else if matches!(c, 'e' | 'E') {
            is_float = true;
            text.push(c);
            cur.bump();
            if let Some(sign @ ('+' | '-')) = cur.peek() {
                text.push(sign);
                cur.bump();
            }
            if !cur.peek().is_some_and(|d| d.is_ascii_digit()) {
                return Err(cur.error(line, column, "malformed exponent"));
            }
        } else {
            break;
        }
    }
    Ok(match cur.peek() {
        Some('l' | 'L') if !is_float => {
            cur.bump();
            Tok::Long(text)
        }
        Some('f' | 'F') => {
            cur.bump();
            Tok::Float(text)
        }
        Some('d' | 'D') => {
            cur.bump();
            Tok::Double(text)
        }
        _ if is_float => Tok::Double(text),
        _ => Tok::Int(text),
    })
}

fn quoted(cur: &mut Cursor<'_>, quote: char, line: u32, column: u32) -> Result<String, ExtractError> {
    cur.bump();
    let mut body = String::new();
    loop {
        match cur.bump() {
            None | Some('\n') => {
                return Err(cur.error(line, column, "unterminated literal"));
            }
            Some('\\') => {
                body.push('\\');
                match cur.bump() {
                    Some(c) if c != '\n' => body.push(c),
                    _ => return Err(cur.error(line, column, "unterminated literal")),
                }
            }
            Some(c) if c == quote => return Ok(body),
            Some(c) => body.push(c),
        }
    }
}

fn text_block(cur: &mut Cursor<'_>, line: u32, column: u32) -> Result<Tok, ExtractError> {
    for _ in 0..3 {
        cur.bump();
    }
    let mut body = String::new();
    loop {
        if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                cur.bump();
            }
            return Ok(Tok::Str(body));
        }
        match cur.bump() {
            None => return Err(cur.error(line, column, "unterminated text block")),
            Some('\\') => {
                body.push('\\');
                if let Some(c) = cur.bump() {
                    body.push(c);
                }
            }
            Some(c) => body.push(c),
        }
    }
}

/// Verifies that `()`, `[]` and `{}` nest properly.
pub fn check_balance(tokens: &[Token]) -> Result<(), ExtractError> {
    let mut stack: Vec<&Token> = Vec::new();
    for t in tokens {
        let Tok::Punct(p) = t.tok else { continue };
        match p {
            "(" | "[" | "{" => stack.push(t),
            ")" | "]" | "}" => {
                let want = match p {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                match stack.pop() {
                    Some(open) if open.tok == Tok::Punct(want) => {}
                    Some(open) => {
                        return Err(ExtractError::UnparsableSource {
                            line: t.line,
                            column: t.column,
                            message: format!(
                                "`{p}` does not match `{}` opened at {}:{}",
                                open.text(),
                                open.line,
                                open.column
                            ),
                        })
                    }
                    None => {
                        return Err(ExtractError::UnparsableSource {
                            line: t.line,
                            column: t.column,
                            message: format!("unmatched `{p}`"),
                        })
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(open) = stack.pop() {
        return Err(ExtractError::UnparsableSource {
            line: open.line,
            column: open.column,
            message: format!("`{}` is never closed", open.text()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_statement() {
        assert_eq!(
            toks("parser.setKind(0);"),
            vec![
                Tok::Ident("parser".into()),
                Tok::Punct("."),
                Tok::Ident("setKind".into()),
                Tok::Punct("("),
                Tok::Int("0".into()),
                Tok::Punct(")"),
                Tok::Punct(";"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            toks("1L 0x1F 1.5 2f 1e3 'a' \"s\\\"x\""),
            vec![
                Tok::Long("1".into()),
                Tok::Int("0x1F".into()),
                Tok::Double("1.5".into()),
                Tok::Float("2".into()),
                Tok::Double("1e3".into()),
                Tok::Char("a".into()),
                Tok::Str("s\\\"x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn generic_closers_stay_split() {
        let t = tokenize("List<List<String>> x >>= 1").unwrap();
        let gts: Vec<_> = t.iter().filter(|t| t.tok == Tok::Punct(">")).collect();
        assert_eq!(gts.len(), 4);
        assert!(gts[0].joined);
        assert!(!gts[1].joined);
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("// hi\n/* a\n b */ x").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("x".into()));
        assert_eq!((t[0].line, t[0].column), (3, 7));
    }

    #[test]
    fn lexical_errors_carry_position() {
        match tokenize("int x = #;") {
            Err(ExtractError::UnparsableSource { line, column, .. }) => {
                assert_eq!((line, column), (1, 9))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("/* open").is_err());
    }

    #[test]
    fn balance() {
        assert!(check_balance(&tokenize("class A { void m() { } }").unwrap()).is_ok());
        assert!(check_balance(&tokenize("class A { ").unwrap()).is_err());
        assert!(check_balance(&tokenize("m(]").unwrap()).is_err());
        assert!(check_balance(&tokenize("}").unwrap()).is_err());
    }
}
