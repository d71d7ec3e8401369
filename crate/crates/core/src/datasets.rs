//! Small labelled UCI datasets bundled with the crate: Fisher's Iris
//! (150 × 4, 3 classes) and Wine (178 × 13, 3 classes).

use ndarray::Array2;

const IRIS_CSV: &str = include_str!("../data/iris.csv");
const WINE_CSV: &str = include_str!("../data/wine.csv");

/// Real-valued features with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericDataset {
    pub names: Vec<String>,
    pub values: Array2<f64>,
    pub labels: Vec<usize>,
}

fn parse_bundled(csv: &str) -> NumericDataset {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let n_features = header.len() - 1;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        values.extend(cells[..n_features].iter().map(|c| c.parse::<f64>().expect("numeric cell")));
        labels.push(cells[n_features].parse().expect("integer label"));
    }
    NumericDataset {
        names: header[..n_features].iter().map(|s| s.to_string()).collect(),
        values: Array2::from_shape_vec((labels.len(), n_features), values).expect("rectangular"),
        labels,
    }
}

pub fn iris() -> NumericDataset {
    parse_bundled(IRIS_CSV)
}

pub fn wine() -> NumericDataset {
    parse_bundled(WINE_CSV)
}
