//! Line-oriented text serialization of a [`SocialNetwork`].
//!
//! ```text
//! n gamma epsilon seed
//! id x y degree          (n lines)
//! id contact_id ...      (n lines)
//! ```
//!
//! Reals are written with 17 significant digits so they parse back exactly.

use std::io::{BufRead, Write};

use super::{NetworkConfig, Node, SocialNetwork};
use crate::error::{Error, Result};
use crate::grid::Point;

/// 17 significant digits in scientific notation.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl SocialNetwork {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let c = &self.config;
        writeln!(out, "{} {} {} {}", c.n, format_real(c.gamma), format_real(c.epsilon), c.seed)?;
        for node in &self.nodes {
            writeln!(
                out,
                "{} {} {} {}",
                node.id,
                format_real(node.position.x),
                format_real(node.position.y),
                node.degree
            )?;
        }
        for (id, cs) in self.contacts.iter().enumerate() {
            write!(out, "{id}")?;
            for c in cs {
                write!(out, " {c}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the text format. Truncation and fallback flags are recomputed
    /// from degrees and contact sets.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i, l)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::Parse { line: 0, message: format!("unexpected end of input, expected {what}") }),
            }
        };

        let (line, header) = next("header")?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(line, "header must be `n gamma epsilon seed`"));
        }
        let n: usize = field(fields[0], line, "n")?;
        let config = NetworkConfig {
            n,
            gamma: field(fields[1], line, "gamma")?,
            epsilon: field(fields[2], line, "epsilon")?,
            seed: field(fields[3], line, "seed")?,
        };

        let mut nodes = Vec::with_capacity(n);
        for expect in 0..n {
            let (line, text) = next("node line")?;
            let f: Vec<&str> = text.split_whitespace().collect();
            if f.len() != 4 {
                return Err(parse_err(line, "node line must be `id x y degree`"));
            }
            let id: usize = field(f[0], line, "id")?;
            if id != expect {
                return Err(parse_err(line, &format!("expected node id {expect}, found {id}")));
            }
            let x: f64 = field(f[1], line, "x")?;
            let y: f64 = field(f[2], line, "y")?;
            let degree: usize = field(f[3], line, "degree")?;
            if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
                return Err(parse_err(line, "position outside the unit square"));
            }
            if degree == 0 {
                return Err(parse_err(line, "degree must be at least 1"));
            }
            nodes.push(Node { id, position: Point::new(x, y), degree });
        }

        let mut contacts = Vec::with_capacity(n);
        for expect in 0..n {
            let (line, text) = next("contact line")?;
            let mut f = text.split_whitespace();
            let id: usize = field(f.next().unwrap_or(""), line, "id")?;
            if id != expect {
                return Err(parse_err(line, &format!("expected contact line for {expect}, found {id}")));
            }
            let mut cs = Vec::new();
            for tok in f {
                let c: usize = field(tok, line, "contact id")?;
                if c >= n || c == id {
                    return Err(parse_err(line, &format!("invalid contact {c}")));
                }
                cs.push(c);
            }
            contacts.push(cs);
        }

        let truncated = nodes.iter().zip(&contacts).map(|(v, cs)| cs.len() < v.degree).collect();
        let fallback = nodes
            .iter()
            .zip(&contacts)
            .map(|(v, cs)| cs.iter().any(|&u| nodes[u].degree >= v.degree))
            .collect();
        Ok(SocialNetwork { config, nodes, contacts, truncated, fallback })
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse { line, message: message.to_string() }
}

fn field<T: std::str::FromStr>(tok: &str, line: usize, name: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, &format!("cannot parse {name} from `{tok}`")))
}
