use std::fmt;

/// Maximum number of fractional digits accepted in a decimal token.
const MAX_SCALE: u32 = 12;

/// A non-negative decimal number held exactly as `units / 10^scale`.
///
/// Region percentages, size percentages and rotation angles are decimal tokens
/// in the request grammar. Keeping them exact makes pixel resolution and
/// canonical rendering reproducible without floating-point drift. Values are
/// normalized (no trailing fractional zeros), so derived equality is numeric
/// equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    units: u64,
    scale: u32,
}

impl Decimal {
    pub const ZERO: Decimal = Decimal { units: 0, scale: 0 };

    pub fn from_int(value: u64) -> Self {
        Decimal { units: value, scale: 0 }
    }

    /// Builds `units / 10^scale`, normalizing trailing zeros away.
    pub fn new(units: u64, scale: u32) -> Option<Self> {
        if scale > MAX_SCALE {
            return None;
        }
        let mut d = Decimal { units, scale };
        while d.scale > 0 && d.units.is_multiple_of(10) {
            d.units /= 10;
            d.scale -= 1;
        }
        if d.units == 0 {
            d.scale = 0;
        }
        Some(d)
    }

    /// Parses the strict grammar `digits [ "." digits ]`.
    pub fn parse(s: &str) -> Option<Self> {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (s, None),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac = frac_part.unwrap_or("");
        if frac_part.is_some() && frac.is_empty() {
            return None;
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() as u32 > MAX_SCALE {
            return None;
        }
        let mut units: u64 = 0;
        for b in int_part.bytes().chain(frac.bytes()) {
            units = units.checked_mul(10)?.checked_add(u64::from(b - b'0'))?;
        }
        Decimal::new(units, frac.len() as u32)
    }

    pub fn units(self) -> u64 {
        self.units
    }

    pub fn scale(self) -> u32 {
        self.scale
    }

    /// `10^scale` as a wide integer.
    pub fn denominator(self) -> u128 {
        10u128.pow(self.scale)
    }

    pub fn is_zero(self) -> bool {
        self.units == 0
    }

    pub fn to_f64(self) -> f64 {
        self.units as f64 / 10f64.powi(self.scale as i32)
    }

    /// Compares against an integer without loss.
    pub fn cmp_int(self, value: u64) -> std::cmp::Ordering {
        u128::from(self.units).cmp(&(u128::from(value) * self.denominator()))
    }

    /// `floor(self / 100 * dim)`.
    pub fn percent_of_floor(self, dim: u32) -> u64 {
        let num = u128::from(self.units) * u128::from(dim);
        let den = self.denominator() * 100;
        (num / den) as u64
    }

    /// `round_half_up(self / 100 * dim)`.
    pub fn percent_of_round(self, dim: u32) -> u64 {
        let num = u128::from(self.units) * u128::from(dim);
        let den = self.denominator() * 100;
        ((2 * num + den) / (2 * den)) as u64
    }
}

impl Default for Decimal {
    fn default() -> Self {
        Decimal::ZERO
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let scale = self.scale.max(other.scale);
        let a = u128::from(self.units) * 10u128.pow(scale - self.scale);
        let b = u128::from(other.units) * 10u128.pow(scale - other.scale);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let den = 10u64.pow(self.scale);
        write!(
            f,
            "{}.{:0width$}",
            self.units / den,
            self.units % den,
            width = self.scale as usize
        )
    }
}
