use std::fmt;

/// Index of a node in the deployment. The base station takes the id right
/// after the last sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        distance_to(*self, *other)
    }
}

/// Euclidean distance.
pub fn distance_to(a: Position, b: Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclid_examples() {
        assert_eq!(distance_to(Position::new(3.0, 4.0), Position::new(0.0, 0.0)), 5.0);
        assert_eq!(distance_to(Position::new(2.5, 2.5), Position::new(2.5, 2.5)), 0.0);
        assert_eq!(distance_to(Position::new(1.0, 1.0), Position::new(4.0, 5.0)), 5.0);
    }
}
