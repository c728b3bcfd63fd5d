//! Plain-text edge lists.
//!
//! ```text
//! # swg n=5 model=custom
//! 0 1 R
//! ...
//! 0 3 B
//! ```
//!
//! One line per edge, `u v kind`, with kind `R` (ring or local edge) or `B`
//! (bridge). Small-world graphs list all `n` ring edges `i (i+1 mod n) R`
//! followed by their bridges. Generic graphs use `model=generic:d=<max degree>`
//! and only `R` lines. Blank lines and further `#` lines are ignored.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{ring_edge_index, BridgeModel, GenericGraph, NodeId, SmallWorldGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeListGraph {
    SmallWorld(SmallWorldGraph),
    Generic(GenericGraph),
}

pub fn swg_to_string(g: &SmallWorldGraph) -> String {
    let n = g.n();
    let mut s = format!("# swg n={n} model={}\n", g.model().tag());
    for i in 0..n {
        let j = (i + 1) % n;
        writeln!(s, "{} {} R", i.min(j), i.max(j)).unwrap();
    }
    for (u, v) in g.bridges().edges() {
        writeln!(s, "{u} {v} B").unwrap();
    }
    s
}

pub fn generic_to_string(g: &GenericGraph) -> String {
    let mut s = format!("# swg n={} model=generic:d={}\n", g.n(), g.max_degree());
    for (u, v) in g.adjacency().edges() {
        writeln!(s, "{u} {v} R").unwrap();
    }
    s
}

pub fn write_swg<W: Write>(g: &SmallWorldGraph, mut w: W) -> Result<()> {
    w.write_all(swg_to_string(g).as_bytes())?;
    Ok(())
}

fn parse_model(tag: &str, line: usize) -> Result<ModelTag> {
    let bad = || Error::Parse {
        line,
        msg: format!("unknown model tag `{tag}`"),
    };
    if tag == "matching" {
        Ok(ModelTag::Bridges(BridgeModel::Matching))
    } else if tag == "custom" {
        Ok(ModelTag::Bridges(BridgeModel::Custom))
    } else if let Some(c) = tag.strip_prefix("erdos:c=") {
        let c = c.parse::<f64>().map_err(|_| bad())?;
        Ok(ModelTag::Bridges(BridgeModel::Erdos { c }))
    } else if let Some(d) = tag.strip_prefix("generic:d=") {
        Ok(ModelTag::Generic(d.parse::<usize>().map_err(|_| bad())?))
    } else {
        Err(bad())
    }
}

enum ModelTag {
    Bridges(BridgeModel),
    Generic(usize),
}

pub fn read_edge_list<B: BufRead>(reader: B) -> Result<EdgeListGraph> {
    let mut header: Option<(usize, ModelTag)> = None;
    let mut ring = Vec::new();
    let mut bridges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if header.is_none() {
                if let Some(fields) = rest.strip_prefix("swg") {
                    let mut n = None;
                    let mut model = None;
                    for f in fields.split_whitespace() {
                        if let Some(v) = f.strip_prefix("n=") {
                            n = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                                line: line_no,
                                msg: format!("bad node count `{v}`"),
                            })?);
                        } else if let Some(v) = f.strip_prefix("model=") {
                            model = Some(parse_model(v, line_no)?);
                        }
                    }
                    match (n, model) {
                        (Some(n), Some(m)) => header = Some((n, m)),
                        _ => {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: "header needs n=<n> and model=<tag>".into(),
                            })
                        }
                    }
                }
            }
            continue;
        }
        let Some((n, _)) = &header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "edge before `# swg` header".into(),
            });
        };
        let mut it = line.split_whitespace();
        let parse_node = |tok: Option<&str>| -> Result<NodeId> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected `u v kind`".into(),
            })?;
            let v = tok.parse::<NodeId>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad node id `{tok}`"),
            })?;
            if v >= *n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("node {v} out of range"),
                });
            }
            Ok(v)
        };
        let u = parse_node(it.next())?;
        let v = parse_node(it.next())?;
        match it.next() {
            Some("R") => ring.push((u.min(v), u.max(v))),
            Some("B") => bridges.push((u.min(v), u.max(v))),
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("edge kind must be R or B, got {other:?}"),
                })
            }
        }
        if it.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "trailing tokens".into(),
            });
        }
    }
    let Some((n, model)) = header else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing `# swg` header".into(),
        });
    };
    match model {
        ModelTag::Bridges(model) => {
            ring.sort_unstable();
            ring.dedup();
            let complete = ring.len() == n && ring.iter().all(|&(u, v)| ring_edge_index(n, u, v).is_some());
            if !complete {
                return Err(Error::Contract(format!(
                    "small-world edge list must contain exactly the {n} ring edges"
                )));
            }
            Ok(EdgeListGraph::SmallWorld(SmallWorldGraph::from_bridges(n, &bridges, model)?))
        }
        ModelTag::Generic(d) => {
            if !bridges.is_empty() {
                return Err(Error::Contract("generic graphs have no bridges".into()));
            }
            Ok(EdgeListGraph::Generic(GenericGraph::from_edges(n, &ring, d)?))
        }
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListGraph> {
    read_edge_list(text.as_bytes())
}
