//! Electrical netlist reader/writer.
//!
//! ```text
//! chip <width_mm> <height_mm>
//! net <id> <n_pins> <driver_index>
//! pin <x_mm> <y_mm>        # n_pins of these
//! ```

use super::{parse_num, tokenize, ParseError};
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub id: u32,
    /// Index into `pins` of the driving pin; all others are sinks.
    pub driver: usize,
    pub pins: Vec<Point>,
}

impl Net {
    pub fn driver_pos(&self) -> Point {
        self.pins[self.driver]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub chip_w: f64,
    pub chip_h: f64,
    pub nets: Vec<Net>,
}

pub fn parse_netlist(text: &str) -> Result<Netlist, ParseError> {
    let mut chip: Option<(f64, f64)> = None;
    let mut nets: Vec<Net> = Vec::new();
    // (line, col, id, remaining pin count, driver) of the net being filled.
    let mut open: Option<(usize, usize, u32, usize, usize)> = None;
    let mut pins: Vec<Point> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let (kcol, keyword) = toks[0];
        match keyword {
            "chip" => {
                if chip.is_some() {
                    return Err(ParseError::new(line, kcol, "duplicate chip line"));
                }
                if !nets.is_empty() || open.is_some() {
                    return Err(ParseError::new(line, kcol, "chip line must come first"));
                }
                if toks.len() != 3 {
                    return Err(ParseError::new(line, kcol, "expected `chip <w> <h>`"));
                }
                let w: f64 = parse_num(line, toks[1].0, toks[1].1, "chip width")?;
                let h: f64 = parse_num(line, toks[2].0, toks[2].1, "chip height")?;
                if !(w > 0.0) || !(h > 0.0) || !w.is_finite() || !h.is_finite() {
                    return Err(ParseError::new(
                        line,
                        toks[1].0,
                        format!("chip dimensions must be positive, got {w} x {h}"),
                    ));
                }
                chip = Some((w, h));
            }
            "net" => {
                if chip.is_none() {
                    return Err(ParseError::new(line, kcol, "net before chip line"));
                }
                if let Some((l, c, id, remaining, _)) = open {
                    if remaining > 0 {
                        return Err(ParseError::new(
                            l,
                            c,
                            format!("net {id} declares more pins than provided (line {line} starts a new net)"),
                        ));
                    }
                }
                close_net(&mut open, &mut pins, &mut nets);
                if toks.len() != 4 {
                    return Err(ParseError::new(line, kcol, "expected `net <id> <n_pins> <driver_index>`"));
                }
                let id: u32 = parse_num(line, toks[1].0, toks[1].1, "net id")?;
                let n_pins: usize = parse_num(line, toks[2].0, toks[2].1, "pin count")?;
                let driver: usize = parse_num(line, toks[3].0, toks[3].1, "driver index")?;
                if nets.iter().any(|n| n.id == id) {
                    return Err(ParseError::new(line, toks[1].0, format!("duplicate net id {id}")));
                }
                if n_pins < 2 {
                    return Err(ParseError::new(
                        line,
                        toks[2].0,
                        format!("net {id} needs at least 2 pins, got {n_pins}"),
                    ));
                }
                if driver >= n_pins {
                    return Err(ParseError::new(
                        line,
                        toks[3].0,
                        format!("driver index {driver} out of range for {n_pins} pins"),
                    ));
                }
                open = Some((line, kcol, id, n_pins, driver));
            }
            "pin" => {
                let (w, h) = match chip {
                    Some(c) => c,
                    None => return Err(ParseError::new(line, kcol, "pin before chip line")),
                };
                let slot = match open.as_mut() {
                    Some(s) if s.3 > 0 => s,
                    _ => return Err(ParseError::new(line, kcol, "pin outside a net")),
                };
                if toks.len() != 3 {
                    return Err(ParseError::new(line, kcol, "expected `pin <x> <y>`"));
                }
                let x: f64 = parse_num(line, toks[1].0, toks[1].1, "pin x")?;
                let y: f64 = parse_num(line, toks[2].0, toks[2].1, "pin y")?;
                if !x.is_finite() || !y.is_finite() || x < 0.0 || x > w || y < 0.0 || y > h {
                    return Err(ParseError::new(
                        line,
                        toks[1].0,
                        format!("pin ({x}, {y}) outside chip 0..{w} x 0..{h}"),
                    ));
                }
                pins.push(Point::new(x, y));
                slot.3 -= 1;
            }
            other => {
                return Err(ParseError::new(line, kcol, format!("unknown keyword `{other}`")));
            }
        }
    }

    if let Some((l, c, id, remaining, _)) = open {
        if remaining > 0 {
            return Err(ParseError::new(l, c, format!("net {id} is missing {remaining} pin(s)")));
        }
    }
    close_net(&mut open, &mut pins, &mut nets);

    let (chip_w, chip_h) = chip.ok_or_else(|| ParseError::new(1, 1, "missing chip line"))?;
    Ok(Netlist { chip_w, chip_h, nets })
}

fn close_net(
    open: &mut Option<(usize, usize, u32, usize, usize)>,
    pins: &mut Vec<Point>,
    nets: &mut Vec<Net>,
) {
    if let Some((_, _, id, 0, driver)) = open.take() {
        nets.push(Net { id, driver, pins: std::mem::take(pins) });
    } else {
        pins.clear();
    }
}

/// Canonical form: one `chip` line, then each net followed by its pins.
/// Floats print with Rust's shortest round-trip formatting, so
/// `parse_netlist(write_netlist(n)) == n`.
pub fn write_netlist(n: &Netlist) -> String {
    let mut out = String::new();
    out.push_str(&format!("chip {} {}\n", n.chip_w, n.chip_h));
    for net in &n.nets {
        out.push_str(&format!("net {} {} {}\n", net.id, net.pins.len(), net.driver));
        for p in &net.pins {
            out.push_str(&format!("pin {} {}\n", p.x, p.y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_NETS: &str = "\
chip 20 20
net 0 2 0
pin 1 1
pin 9 1
net 1 3 1
pin 2.5 3
pin 2.5 9.25
pin 4 9
net 2 2 0
pin 10 10
pin 18 10
";

    #[test]
    fn parses_drivers_per_net() {
        let nl = parse_netlist(THREE_NETS).unwrap();
        assert_eq!(nl.chip_w, 20.0);
        assert_eq!(nl.nets.len(), 3);
        let drivers: Vec<usize> = nl.nets.iter().map(|n| n.driver).collect();
        assert_eq!(drivers, vec![0, 1, 0]);
        assert_eq!(nl.nets[1].pins[1], Point::new(2.5, 9.25));
        assert_eq!(nl.nets[1].driver_pos(), Point::new(2.5, 9.25));
    }

    #[test]
    fn roundtrips_canonical_form() {
        let nl = parse_netlist(THREE_NETS).unwrap();
        let text = write_netlist(&nl);
        assert_eq!(parse_netlist(&text).unwrap(), nl);
        // Canonical text itself is stable under a second pass.
        assert_eq!(write_netlist(&parse_netlist(&text).unwrap()), text);
    }

    #[test]
    fn rejects_out_of_bounds_pin() {
        let bad = "chip 20 20\nnet 0 2 0\npin 25.0 1\npin 1 1\n";
        let err = parse_netlist(bad).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.msg.contains("outside chip"), "{err}");
    }

    #[test]
    fn rejects_duplicate_net_id() {
        let bad = "chip 20 20\nnet 7 2 0\npin 1 1\npin 2 2\nnet 7 2 0\npin 3 3\npin 4 4\n";
        let err = parse_netlist(bad).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.msg.contains("duplicate net id 7"), "{err}");
    }

    #[test]
    fn rejects_missing_pins() {
        let bad = "chip 20 20\nnet 0 3 0\npin 1 1\npin 2 2\n";
        let err = parse_netlist(bad).unwrap_err();
        assert!(err.msg.contains("missing 1 pin"), "{err}");
    }

    #[test]
    fn rejects_single_pin_net_and_bad_driver() {
        let e1 = parse_netlist("chip 9 9\nnet 0 1 0\npin 1 1\n").unwrap_err();
        assert!(e1.msg.contains("at least 2 pins"), "{e1}");
        let e2 = parse_netlist("chip 9 9\nnet 0 2 2\npin 1 1\npin 2 2\n").unwrap_err();
        assert!(e2.msg.contains("driver index 2 out of range"), "{e2}");
    }

    #[test]
    fn rejects_garbage_and_missing_chip() {
        assert!(parse_netlist("net 0 2 0\npin 1 1\npin 2 2\n").is_err());
        let err = parse_netlist("chip 9 9\nblob 1 2\n").unwrap_err();
        assert_eq!((err.line, err.col), (2, 1));
        assert!(parse_netlist("").is_err());
    }

    #[test]
    fn accepts_comments_and_blank_lines() {
        let text = "# header\nchip 20 20\n\nnet 0 2 0 # two pins\npin 1 1\npin 9 1\n";
        assert_eq!(parse_netlist(text).unwrap().nets.len(), 1);
    }
}
