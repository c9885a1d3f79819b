//! Line-oriented region file format.
//!
//! ```text
//! # comment
//! region fig1
//! source synthetic          # optional
//! box 0 0 60 40             # optional, DBU llx lly urx ury
//! dim 7 5 2
//! pitch 1 1                 # optional, default 1 1
//! origin 0 0                # optional, default 0 0
//! blockage 0 0 1
//! net 1
//! pin 0 ap 0 1 0
//! pin 1 ap 6 1 0 ap 6 2 0
//! end
//! ```
//!
//! Unknown keys are errors.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{DesignIoError, NetSpec, PinSpec, Provenance, RegionDescriptor};
use crate::grid::{GridDim, MazeIndex, Pitch};

fn syntax(line: usize, message: impl Into<String>) -> DesignIoError {
    DesignIoError::Syntax {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, DesignIoError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

fn finish<'a>(line: usize, mut toks: impl Iterator<Item = &'a str>) -> Result<(), DesignIoError> {
    match toks.next() {
        None => Ok(()),
        Some(t) => Err(syntax(line, format!("unexpected token `{t}`"))),
    }
}

fn index<'a>(line: usize, toks: &mut impl Iterator<Item = &'a str>) -> Result<MazeIndex, DesignIoError> {
    Ok(MazeIndex::new(
        number(line, toks.next(), "x index")?,
        number(line, toks.next(), "y index")?,
        number(line, toks.next(), "z index")?,
    ))
}

struct OpenNet {
    line: usize,
    id: u32,
    pins: Vec<PinSpec>,
}

/// Parses and validates a region file.
pub fn parse_region(bytes: &[u8]) -> Result<RegionDescriptor, DesignIoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        syntax(line, "invalid UTF-8")
    })?;

    let mut name = None;
    let mut dim = None;
    let mut pitch = None;
    let mut origin = None;
    let mut provenance = Provenance::default();
    let mut blockages = Vec::new();
    let mut nets = Vec::new();
    let mut open: Option<OpenNet> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else { continue };

        if let Some(net) = open.as_mut() {
            match key {
                "pin" => {
                    let id = number(line, toks.next(), "pin id")?;
                    let mut aps = Vec::new();
                    while let Some(t) = toks.next() {
                        if t != "ap" {
                            return Err(syntax(line, format!("expected `ap`, found `{t}`")));
                        }
                        aps.push(index(line, &mut toks)?);
                    }
                    if aps.is_empty() {
                        return Err(syntax(line, format!("pin {id} lists no access point")));
                    }
                    if net.pins.iter().any(|p| p.id == id) {
                        return Err(DesignIoError::Semantic {
                            line: Some(line),
                            message: format!("net {} declares pin {id} twice", net.id),
                        });
                    }
                    net.pins.push(PinSpec { id, access_points: aps });
                }
                "end" => {
                    finish(line, toks)?;
                    let mut done = open.take().expect("open net");
                    done.pins.sort_by_key(|p| p.id);
                    if done.pins.is_empty() {
                        return Err(DesignIoError::Semantic {
                            line: Some(done.line),
                            message: format!("net {} has no pins", done.id),
                        });
                    }
                    nets.push(NetSpec {
                        id: done.id,
                        pins: done.pins,
                    });
                }
                other => {
                    return Err(syntax(line, format!("`{other}` is not allowed inside a net block")));
                }
            }
            continue;
        }

        let once = |slot_is_set: bool| {
            if slot_is_set {
                Err(syntax(line, format!("`{key}` given twice")))
            } else {
                Ok(())
            }
        };
        match key {
            "region" => {
                once(name.is_some())?;
                let n: &str = toks.next().ok_or_else(|| syntax(line, "missing region name"))?;
                finish(line, toks)?;
                name = Some(n.to_string());
            }
            "source" => {
                once(provenance.source.is_some())?;
                let s: &str = toks.next().ok_or_else(|| syntax(line, "missing source name"))?;
                finish(line, toks)?;
                provenance.source = Some(s.to_string());
            }
            "box" => {
                once(provenance.bbox.is_some())?;
                let b = [
                    number(line, toks.next(), "llx")?,
                    number(line, toks.next(), "lly")?,
                    number(line, toks.next(), "urx")?,
                    number(line, toks.next(), "ury")?,
                ];
                finish(line, toks)?;
                provenance.bbox = Some(b);
            }
            "dim" => {
                once(dim.is_some())?;
                let d = GridDim {
                    dx: number(line, toks.next(), "dx")?,
                    dy: number(line, toks.next(), "dy")?,
                    dz: number(line, toks.next(), "dz")?,
                };
                finish(line, toks)?;
                dim = Some(d);
            }
            "pitch" => {
                once(pitch.is_some())?;
                let p = Pitch {
                    x: number(line, toks.next(), "x pitch")?,
                    y: number(line, toks.next(), "y pitch")?,
                };
                finish(line, toks)?;
                pitch = Some(p);
            }
            "origin" => {
                once(origin.is_some())?;
                let o = (number(line, toks.next(), "x origin")?, number(line, toks.next(), "y origin")?);
                finish(line, toks)?;
                origin = Some(o);
            }
            "blockage" => {
                let b = index(line, &mut toks)?;
                finish(line, toks)?;
                blockages.push(b);
            }
            "net" => {
                let id = number(line, toks.next(), "net id")?;
                finish(line, toks)?;
                open = Some(OpenNet {
                    line,
                    id,
                    pins: Vec::new(),
                });
            }
            "pin" | "end" => return Err(syntax(line, format!("`{key}` outside a net block"))),
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        }
    }

    if let Some(net) = open {
        return Err(syntax(net.line, format!("net {} is missing `end`", net.id)));
    }
    let region = RegionDescriptor {
        name: name.ok_or_else(|| syntax(1, "missing `region` line"))?,
        dim: dim.ok_or_else(|| syntax(1, "missing `dim` line"))?,
        origin: origin.unwrap_or((0, 0)),
        pitch: pitch.unwrap_or_default(),
        blockages,
        nets,
        provenance,
    };
    region.validate()?;
    Ok(region)
}

/// Canonical text form; `parse_region` reads it back to an equal descriptor.
pub fn serialize_region(region: &RegionDescriptor) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "region {}", region.name);
    if let Some(s) = &region.provenance.source {
        let _ = writeln!(out, "source {s}");
    }
    if let Some([a, b, c, d]) = region.provenance.bbox {
        let _ = writeln!(out, "box {a} {b} {c} {d}");
    }
    let d = region.dim;
    let _ = writeln!(out, "dim {} {} {}", d.dx, d.dy, d.dz);
    let _ = writeln!(out, "pitch {} {}", region.pitch.x, region.pitch.y);
    let _ = writeln!(out, "origin {} {}", region.origin.0, region.origin.1);
    for b in &region.blockages {
        let _ = writeln!(out, "blockage {} {} {}", b.x, b.y, b.z);
    }
    for net in &region.nets {
        let _ = writeln!(out, "net {}", net.id);
        for pin in &net.pins {
            let _ = write!(out, "pin {}", pin.id);
            for ap in &pin.access_points {
                let _ = write!(out, " ap {} {} {}", ap.x, ap.y, ap.z);
            }
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let r = parse_region(b"region tiny\ndim 2 2 1\n").unwrap();
        assert!(r.nets.is_empty());
        assert_eq!(r.pitch, Pitch::default());
    }

    #[test]
    fn comments_and_nets() {
        let text = "# header\nregion r # trailing\ndim 3 3 2\nnet 4\npin 1 ap 2 2 0\npin 0 ap 0 0 0 ap 0 1 0\nend\n";
        let r = parse_region(text.as_bytes()).unwrap();
        assert_eq!(r.nets[0].id, 4);
        assert_eq!(r.nets[0].pins[0].access_points.len(), 2);
        assert_eq!(r.nets[0].pins[1].id, 1);
    }

    #[test]
    fn out_of_bounds_access_point() {
        let err = parse_region(b"region r\ndim 2 2 1\nnet 0\npin 0 ap 5 0 0\nend\n").unwrap_err();
        assert!(matches!(err, DesignIoError::Semantic { .. }), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_region(b"region r\ndim 2 2 1\nfoo 1\n").unwrap_err();
        assert_eq!(
            err,
            DesignIoError::Syntax {
                line: 3,
                message: "unknown key `foo`".into()
            }
        );
        let err = parse_region(b"region r\ndim 2 x 1\n").unwrap_err();
        assert!(matches!(err, DesignIoError::Syntax { line: 2, .. }));
        let err = parse_region(b"region r\ndim 2 2 1\nnet 0\npin 0 ap 0 0 0\n").unwrap_err();
        assert!(err.to_string().contains("missing `end`"));
        assert!(parse_region(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn duplicate_access_point_rejected() {
        let text = "region r\ndim 2 2 1\nnet 0\npin 0 ap 0 0 0\npin 1 ap 1 1 0\nend\nnet 1\npin 0 ap 0 0 0\npin 1 ap 1 0 0\nend\n";
        let err = parse_region(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("duplicate access point"));
    }

    #[test]
    fn sparse_pin_ids_rejected() {
        let text = "region r\ndim 3 3 1\nnet 0\npin 0 ap 0 0 0\npin 2 ap 1 1 0\nend\n";
        assert!(parse_region(text.as_bytes()).is_err());
    }

    #[test]
    fn huge_dimension_rejected_without_allocating() {
        let err = parse_region(b"region r\ndim 4000000000 4000000000 4000000000\n").unwrap_err();
        assert!(err.to_string().contains("node limit"));
    }
}
