//! Text format for colorings.
//!
//! ```text
//! # optional comment lines
//! n t
//! c(1,2) c(1,3) ... c(1,n)
//! c(2,3) ... c(2,n)
//! ...
//! ```
//!
//! The body is `n(n-1)/2` integers in lexicographic edge order, separated
//! by any whitespace. The writer emits one line per row as shown above.

use std::io::{self, Read, Write};

use super::{edge_count, CompleteGraphColoring};
use crate::error::{Error, Result};

pub fn write_coloring<W: Write>(coloring: &CompleteGraphColoring, mut out: W) -> io::Result<()> {
    writeln!(out, "{} {}", coloring.n(), coloring.palette())?;
    let n = coloring.n();
    let mut pos = 0;
    for i in 0..n - 1 {
        let row = &coloring.colors()[pos..pos + (n - 1 - i)];
        pos += row.len();
        let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

impl CompleteGraphColoring {
    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        write_coloring(self, &mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub fn read_coloring<R: Read>(mut source: R) -> Result<CompleteGraphColoring> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    parse_coloring(&text)
}

pub fn parse_coloring(text: &str) -> Result<CompleteGraphColoring> {
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header \"n t\"".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(
            hline,
            format!("header must be \"n t\", got {:?}", header),
        ));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vertex count {:?}", fields[0])))?;
    let t: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad palette size {:?}", fields[1])))?;
    if n < 2 || !(1..=super::MAX_PALETTE).contains(&t) {
        return Err(parse_err(
            hline,
            format!("header \"{} {}\" out of range", n, t),
        ));
    }

    let expected = edge_count(n);
    let mut colors = Vec::with_capacity(expected);
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        for tok in line.split_whitespace() {
            let c: u64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad color {:?}", tok)))?;
            if c == 0 {
                return Err(parse_err(lineno, "color 0 is below 1".into()));
            }
            if c > t as u64 {
                return Err(parse_err(
                    lineno,
                    format!("color {} exceeds palette {}", c, t),
                ));
            }
            if colors.len() == expected {
                return Err(parse_err(
                    lineno,
                    format!("more than {} edge colors for n={}", expected, n),
                ));
            }
            colors.push(c as u8);
        }
    }
    if colors.len() != expected {
        return Err(parse_err(
            last_line,
            format!(
                "expected {} edge colors for n={}, found {}",
                expected,
                n,
                colors.len()
            ),
        ));
    }
    CompleteGraphColoring::new(n, t, colors)
}

impl std::str::FromStr for CompleteGraphColoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_coloring(s)
    }
}
