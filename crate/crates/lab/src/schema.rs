//! JSON schemas for every summary file, shipped with the binary.

use crate::config::Command;

pub const FLOW: &str = include_str!("../schemas/flow.schema.json");
pub const PROX: &str = include_str!("../schemas/prox.schema.json");
pub const SLOPE: &str = include_str!("../schemas/slope.schema.json");
pub const MODULUS: &str = include_str!("../schemas/modulus.schema.json");
pub const GROWTH: &str = include_str!("../schemas/growth.schema.json");
pub const KL: &str = include_str!("../schemas/kl.schema.json");
pub const PLN: &str = include_str!("../schemas/pln.schema.json");
pub const FIGURE1: &str = include_str!("../schemas/figure1.schema.json");
pub const CATALOG: &str = include_str!("../schemas/catalog.schema.json");

/// Schema of the JSON file a command writes, if it writes one.
pub fn for_command(c: Command) -> Option<&'static str> {
    Some(match c {
        Command::Flow | Command::RiemFlow => FLOW,
        Command::Prox => PROX,
        Command::Slope => SLOPE,
        Command::Modulus => MODULUS,
        Command::Growth => GROWTH,
        Command::Kl => KL,
        Command::Pln => PLN,
        Command::Figure1 => FIGURE1,
        Command::Catalog => CATALOG,
        Command::Summary => return None,
    })
}
