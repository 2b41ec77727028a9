pub mod config;
pub mod svg;
pub mod trace_file;

pub use config::{parse_config, ConfigError, OutputFormat, OutputSpec, PointsSource, SimulationConfig};
pub use svg::{dual_svg, polygon_svg, SvgStyle};
pub use trace_file::{parse_csv, parse_json, write_trace, TraceFormat, TraceTable};

/// Shortest decimal that parses back to exactly `x`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_num;

    #[test]
    fn shortest_round_trip() {
        assert_eq!(fmt_num(0.6180339887498949), "0.6180339887498949");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1.0");
        for x in [1.0 / 61.0, 2.4845366430871355e-20, 1e300, -3.25e-7] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
