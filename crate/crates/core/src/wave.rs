use crate::grid::Grid;
use crate::model::{basis_transform, BasisDirection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Diabatic,
    Adiabatic,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Diabatic => "diabatic",
            Representation::Adiabatic => "adiabatic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diabatic" | "nad" => Some(Representation::Diabatic),
            "adiabatic" | "ad" => Some(Representation::Adiabatic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(nu: usize) -> Self {
        if nu.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "even" => Some(Parity::Even),
            "odd" => Some(Parity::Odd),
            _ => None,
        }
    }
}

/// Two channel amplitudes sampled on a symmetric grid.
///
/// Diabatic waves hold `(psi_1, psi_2)`, adiabatic waves hold `(psi_u, psi_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoComponentWave<T> {
    pub grid: Grid,
    pub first: Vec<T>,
    pub second: Vec<T>,
    pub representation: Representation,
    pub parity: Parity,
}

impl<T: Copy> TwoComponentWave<T> {
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    pub fn pair(&self, i: usize) -> (T, T) {
        (self.first[i], self.second[i])
    }

    /// Restriction to the central `2 half_steps + 1` nodes.
    pub fn cropped(&self, half_steps: usize) -> Self {
        let n = self.grid.half_steps().min(half_steps);
        let range = self.grid.center() - n..=self.grid.center() + n;
        Self {
            grid: Grid::from_steps(n, self.grid.dx()),
            first: self.first[range.clone()].to_vec(),
            second: self.second[range].to_vec(),
            representation: self.representation,
            parity: self.parity,
        }
    }

    /// Channel that stays bound as `x -> +inf`.
    pub fn forbidden(&self) -> &[T] {
        match self.representation {
            Representation::Diabatic => &self.second,
            Representation::Adiabatic => &self.first,
        }
    }

    /// Channel that carries the outgoing wave as `x -> +inf`.
    pub fn allowed(&self) -> &[T] {
        match self.representation {
            Representation::Diabatic => &self.first,
            Representation::Adiabatic => &self.second,
        }
    }
}

impl<T> TwoComponentWave<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    /// Same state expressed in the other basis; a no-op if already there.
    pub fn to_representation(&self, target: Representation, v: f64) -> Self {
        if target == self.representation {
            return self.clone();
        }
        let direction = match target {
            Representation::Diabatic => BasisDirection::ToDiabatic,
            Representation::Adiabatic => BasisDirection::ToAdiabatic,
        };
        let (first, second) = (0..self.len())
            .map(|i| basis_transform(self.pair(i), direction, self.grid.x(i), v))
            .unzip();
        Self { grid: self.grid, first, second, representation: target, parity: self.parity }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            first: self.first.iter().map(|&a| a * c).collect(),
            second: self.second.iter().map(|&a| a * c).collect(),
            representation: self.representation,
            parity: self.parity,
        }
    }
}

impl TwoComponentWave<f64> {
    /// Pointwise `|psi_1|^2 + |psi_2|^2`, basis independent.
    pub fn density(&self) -> Vec<f64> {
        self.first.iter().zip(&self.second).map(|(a, b)| a * a + b * b).collect()
    }

    /// Complexifies for time propagation.
    pub fn to_complex(&self) -> TwoComponentWave<num_complex::Complex64> {
        let c = |v: &Vec<f64>| v.iter().map(|&a| num_complex::Complex64::new(a, 0.0)).collect();
        TwoComponentWave {
            grid: self.grid,
            first: c(&self.first),
            second: c(&self.second),
            representation: self.representation,
            parity: self.parity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_by_index() {
        assert_eq!(Parity::of_index(0), Parity::Even);
        assert_eq!(Parity::of_index(7), Parity::Odd);
        assert_eq!(Parity::Odd.flip(), Parity::Even);
    }

    #[test]
    fn cropping_keeps_the_center() {
        let grid = Grid::new(2.0, 0.5).unwrap();
        let first: Vec<f64> = grid.points().collect();
        let w = TwoComponentWave { grid, first: first.clone(), second: first, representation: Representation::Diabatic, parity: Parity::Odd };
        let c = w.cropped(1);
        assert_eq!(c.first, vec![-0.5, 0.0, 0.5]);
        assert_eq!(c.grid.x_max(), 0.5);
        assert_eq!(w.cropped(10).len(), w.len());
    }

    #[test]
    fn representation_round_trip_preserves_density() {
        let grid = Grid::new(2.0, 0.5).unwrap();
        let first: Vec<f64> = grid.points().map(|x| (-x * x).exp()).collect();
        let second: Vec<f64> = grid.points().map(|x| x * (-x * x).exp()).collect();
        let w = TwoComponentWave { grid, first, second, representation: Representation::Diabatic, parity: Parity::Even };
        let ad = w.to_representation(Representation::Adiabatic, 0.7);
        let back = ad.to_representation(Representation::Diabatic, 0.7);
        for (a, b) in w.density().iter().zip(ad.density()) {
            assert!((a - b).abs() < 1e-14);
        }
        for (a, b) in w.first.iter().zip(&back.first) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
