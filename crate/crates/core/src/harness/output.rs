//! Experiment records and CSV output.

use std::io::Write;

/// What a row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Entity {
    /// Zero-based user index; written one-based.
    User(usize),
    /// Sum over users (rates).
    Sum,
    /// Aggregate over all bits (BER).
    Total,
}

impl std::fmt::Display for Entity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Entity::User(k) => write!(f, "{}", k + 1),
            Entity::Sum => f.write_str("sum"),
            Entity::Total => f.write_str("total"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Ber,
    BerSingleUser,
    Rate,
    RateSingleUser,
    RateTdma,
    RateRatio,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ber => "ber",
            Metric::BerSingleUser => "ber_single_user",
            Metric::Rate => "rate",
            Metric::RateSingleUser => "rate_single_user",
            Metric::RateTdma => "rate_tdma",
            Metric::RateRatio => "rate_ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub snr_db: f64,
    pub entity: Entity,
    pub metric: Metric,
    pub value: f64,
    pub samples: u64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentResult {
    rows: Vec<Row>,
}

impl ExperimentResult {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First row matching the key.
    pub fn get(&self, snr_db: f64, entity: Entity, metric: Metric) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.entity == entity && r.metric == metric)
    }

    /// Values of one series in SNR order.
    pub fn series(&self, entity: Entity, metric: Metric) -> Vec<&Row> {
        let mut out: Vec<&Row> = self
            .rows
            .iter()
            .filter(|r| r.entity == entity && r.metric == metric)
            .collect();
        out.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
        out
    }

    /// Rows ordered by SNR, then user, then aggregates. Rows sharing a key
    /// keep insertion order.
    pub fn ordered_rows(&self) -> Vec<&Row> {
        let mut out: Vec<&Row> = self.rows.iter().collect();
        out.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db).then(a.entity.cmp(&b.entity)));
        out
    }
}

pub const CSV_HEADER: [&str; 6] = ["snr_db", "entity", "metric", "value", "samples", "stderr"];

/// Writes `result` as CSV. Floats use the shortest decimal form that
/// round-trips.
pub fn emit_csv<W: Write>(result: &ExperimentResult, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in result.ordered_rows() {
        w.write_record([
            r.snr_db.to_string(),
            r.entity.to_string(),
            r.metric.name().to_string(),
            r.value.to_string(),
            r.samples.to_string(),
            r.stderr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(snr: f64, entity: Entity) -> Row {
        Row {
            snr_db: snr,
            entity,
            metric: Metric::Ber,
            value: 0.125,
            samples: 8,
            stderr: 0.0,
        }
    }

    fn render(r: &ExperimentResult) -> String {
        let mut buf = Vec::new();
        emit_csv(r, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn header_only() {
        assert_eq!(
            render(&ExperimentResult::new()),
            "snr_db,entity,metric,value,samples,stderr\n"
        );
    }

    #[test]
    fn one_record() {
        let mut r = ExperimentResult::new();
        r.push(row(10.0, Entity::User(0)));
        assert_eq!(
            render(&r),
            "snr_db,entity,metric,value,samples,stderr\n10,1,ber,0.125,8,0\n"
        );
    }

    #[test]
    fn stable_order() {
        let mut r = ExperimentResult::new();
        r.push(row(5.0, Entity::Total));
        r.push(row(5.0, Entity::User(1)));
        r.push(row(0.0, Entity::Sum));
        r.push(row(5.0, Entity::User(0)));
        let text = render(&r);
        let entities: Vec<&str> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(entities, vec!["sum", "1", "2", "total"]);
    }

    #[test]
    fn full_precision() {
        let mut r = ExperimentResult::new();
        let mut x = row(0.0, Entity::User(0));
        x.value = 1.0 / 3.0;
        x.stderr = 1e-7;
        r.push(x);
        let text = render(&r);
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[5], "0.0000001");
    }
}
