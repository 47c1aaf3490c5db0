//! Line-oriented instance files:
//!
//! ```text
//! STCVRP 1
//! NAME G25_5k_150d
//! VEHICLES 5
//! SPEED 5
//! SERVICE_TIME 8
//! WMAX 8
//! DMAX 150
//! DEPOT 80 80
//! NODES 25
//! 1 0 0
//! ...
//! EOF
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt::Write as _;

use super::{Instance, Params, Point};
use crate::error::{Error, Result};

const MAGIC: &str = "STCVRP";
const VERSION: &str = "1";

/// Renders `instance`, prefixed by one `# ` line per comment. Output is a pure
/// function of the inputs, so regenerated files are byte-identical.
pub fn write_instance(instance: &Instance, comments: &[String]) -> String {
    let p = instance.params();
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "NAME {}", instance.name());
    let _ = writeln!(out, "VEHICLES {}", p.k_max);
    let _ = writeln!(out, "SPEED {}", p.speed);
    let _ = writeln!(out, "SERVICE_TIME {}", p.service_time);
    let _ = writeln!(out, "WMAX {}", p.w_max);
    let _ = writeln!(out, "DMAX {}", p.d_max);
    let d = instance.depot();
    let _ = writeln!(out, "DEPOT {} {}", d.x, d.y);
    let _ = writeln!(out, "NODES {}", instance.n_tasks());
    for (i, t) in instance.tasks().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, t.x, t.y);
    }
    out.push_str("EOF\n");
    out
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    vehicles: Option<usize>,
    speed: Option<f64>,
    service_time: Option<f64>,
    w_max: Option<f64>,
    d_max: Option<f64>,
    depot: Option<Point>,
}

fn number<T: std::str::FromStr>(line: usize, field: &str, tok: Option<&str>) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("{field} is missing a value")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("{field}: cannot parse '{tok}'")))
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<()> {
    if slot.replace(value).is_some() {
        return Err(Error::parse(line, format!("{key} given twice")));
    }
    Ok(())
}

/// Parses an instance file. Rejects missing sections, duplicate or
/// out-of-order node ids, and node counts that disagree with `NODES`.
pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((ln, l)) => {
            let mut toks = l.split_whitespace();
            if toks.next() != Some(MAGIC) {
                return Err(Error::parse(ln, format!("expected '{MAGIC} {VERSION}' header")));
            }
            match toks.next() {
                Some(VERSION) => {}
                other => {
                    return Err(Error::parse(ln, format!("unsupported format version {other:?}")))
                }
            }
        }
        None => return Err(Error::parse(0, "empty instance file")),
    }

    let mut h = Header::default();
    let n_nodes: usize;
    let nodes_line: usize;
    loop {
        let Some((ln, l)) = lines.next() else {
            return Err(Error::parse(0, "missing NODES section"));
        };
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        let mut toks = rest.split_whitespace();
        match key {
            "NAME" => {
                if rest.is_empty() {
                    return Err(Error::parse(ln, "NAME is missing a value"));
                }
                set_once(&mut h.name, rest.to_string(), ln, key)?
            }
            "VEHICLES" => set_once(&mut h.vehicles, number(ln, key, toks.next())?, ln, key)?,
            "SPEED" => set_once(&mut h.speed, number(ln, key, toks.next())?, ln, key)?,
            "SERVICE_TIME" => set_once(&mut h.service_time, number(ln, key, toks.next())?, ln, key)?,
            "WMAX" => set_once(&mut h.w_max, number(ln, key, toks.next())?, ln, key)?,
            "DMAX" => set_once(&mut h.d_max, number(ln, key, toks.next())?, ln, key)?,
            "DEPOT" => {
                let x = number(ln, "DEPOT x", toks.next())?;
                let y = number(ln, "DEPOT y", toks.next())?;
                set_once(&mut h.depot, Point::new(x, y), ln, key)?
            }
            "NODES" => {
                n_nodes = number(ln, key, toks.next())?;
                nodes_line = ln;
                break;
            }
            "EOF" => return Err(Error::parse(ln, "missing NODES section")),
            other => return Err(Error::parse(ln, format!("unknown keyword '{other}'"))),
        }
        if toks.next().is_some() && key != "NAME" {
            return Err(Error::parse(ln, format!("trailing data after {key}")));
        }
    }

    let missing = |what: &str| Error::parse(nodes_line, format!("missing {what} section"));
    let params = Params {
        k_max: h.vehicles.ok_or_else(|| missing("VEHICLES"))?,
        speed: h.speed.ok_or_else(|| missing("SPEED"))?,
        service_time: h.service_time.ok_or_else(|| missing("SERVICE_TIME"))?,
        w_max: h.w_max.ok_or_else(|| missing("WMAX"))?,
        d_max: h.d_max.ok_or_else(|| missing("DMAX"))?,
    };
    let name = h.name.ok_or_else(|| missing("NAME"))?;
    let depot = h.depot.ok_or_else(|| missing("DEPOT"))?;

    let mut tasks = Vec::with_capacity(n_nodes);
    let mut seen_eof = false;
    for (ln, l) in lines.by_ref() {
        if l == "EOF" {
            seen_eof = true;
            break;
        }
        let mut toks = l.split_whitespace();
        let id: usize = number(ln, "node id", toks.next())?;
        let x: f64 = number(ln, "node x", toks.next())?;
        let y: f64 = number(ln, "node y", toks.next())?;
        if toks.next().is_some() {
            return Err(Error::parse(ln, "trailing data after node coordinates"));
        }
        if id >= 1 && id <= tasks.len() {
            return Err(Error::parse(ln, format!("duplicate node id {id}")));
        }
        if id != tasks.len() + 1 {
            return Err(Error::parse(ln, format!("expected node id {}, got {id}", tasks.len() + 1)));
        }
        if tasks.len() == n_nodes {
            return Err(Error::parse(ln, format!("more node lines than NODES {n_nodes}")));
        }
        tasks.push(Point::new(x, y));
    }
    if !seen_eof {
        return Err(Error::parse(0, "missing EOF marker"));
    }
    if tasks.len() != n_nodes {
        return Err(Error::parse(
            nodes_line,
            format!("NODES says {n_nodes} but {} node lines follow", tasks.len()),
        ));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "content after EOF"));
    }

    Instance::new(name, depot, tasks, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Instance {
        Instance::new(
            "G3_2k_150d",
            Point::new(1.5, -2.25),
            vec![Point::new(40.0, 0.0), Point::new(0.1, 0.2), Point::new(-40.0, 1e-3)],
            Params::standard(2, 150.0),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_preserves_everything() {
        let inst = sample();
        let text = write_instance(&inst, &["seed 7".to_string()]);
        assert!(text.starts_with("# seed 7\nSTCVRP 1\nNAME G3_2k_150d\n"));
        let back = read_instance(&text).unwrap();
        assert_eq!(back.name(), inst.name());
        assert_eq!(back.depot(), inst.depot());
        assert_eq!(back.tasks(), inst.tasks());
        assert_eq!(back.params(), inst.params());
        assert_eq!(write_instance(&back, &["seed 7".to_string()]), text);
    }

    fn expect_parse_error(text: &str, needle: &str) {
        match read_instance(text) {
            Err(Error::Parse { message, .. }) => {
                assert!(message.contains(needle), "'{message}' lacks '{needle}'")
            }
            other => panic!("expected parse error containing '{needle}', got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_files() {
        let good = write_instance(&sample(), &[]);
        expect_parse_error(&good.replace("2 0.1 0.2", "1 0.1 0.2"), "duplicate node id 1");
        expect_parse_error(&good.replace("NODES 3", "NODES 4"), "NODES says 4");
        expect_parse_error(&good.replace("NODES 3", "NODES 2"), "more node lines");
        expect_parse_error(&good.replace("WMAX 8\n", ""), "missing WMAX");
        expect_parse_error(&good.replace("DEPOT 1.5 -2.25\n", ""), "missing DEPOT");
        expect_parse_error(&good.replace("EOF\n", ""), "missing EOF");
        expect_parse_error(&good.replace("STCVRP 1", "STCVRP 2"), "unsupported");
        expect_parse_error(&good.replace("SPEED 5", "SPEED fast"), "cannot parse 'fast'");
        expect_parse_error(&good.replace("3 -40 0.001", "3 -40"), "node y is missing");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header comment\n\nSTCVRP 1 # trailing\nNAME tiny\nVEHICLES 1\nSPEED 5\n\
                    SERVICE_TIME 8\nWMAX 8\nDMAX 150\nDEPOT 0 0\nNODES 1\n\n1 40 0 # only task\nEOF\n";
        let inst = read_instance(text).unwrap();
        assert_eq!(inst.n_tasks(), 1);
        assert_eq!(inst.travel(0, 1), 8.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let good = write_instance(&sample(), &[]);
        match read_instance(&good.replace("2 0.1 0.2", "2 0.1 oops")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 11),
            other => panic!("{other:?}"),
        }
    }
}
