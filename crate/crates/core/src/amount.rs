//! Fixed-point token amounts.
//!
//! Amounts are integers in units of 0.0001 EOS, the precision of the EOS
//! symbol. Event weights are `u64`; aggregated graph weights are `u128`.

use thiserror::Error;

/// Number of fraction digits of the EOS symbol.
pub const EOS_PRECISION: u32 = 4;
/// Units per whole EOS.
pub const UNITS_PER_EOS: u64 = 10_000;
/// Symbol accepted in `eosio.token` transfers.
pub const EOS_SYMBOL: &str = "EOS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmountError {
    #[error("quantity {0:?} is not '<decimal> EOS'")]
    Format(String),
    #[error("quantity {0:?} has more than 4 fraction digits")]
    Precision(String),
    #[error("quantity {0:?} overflows")]
    Overflow(String),
}

/// Parses an asset string such as `"1.5000 EOS"` into 0.0001-EOS units.
pub fn parse_quantity(quantity: &str) -> Result<u64, AmountError> {
    let fail = || AmountError::Format(quantity.to_owned());
    let (number, symbol) = quantity.trim().split_once(' ').ok_or_else(fail)?;
    if symbol.trim() != EOS_SYMBOL {
        return Err(fail());
    }
    parse_decimal(number).map_err(|e| match e {
        AmountError::Format(_) => fail(),
        AmountError::Precision(_) => AmountError::Precision(quantity.to_owned()),
        AmountError::Overflow(_) => AmountError::Overflow(quantity.to_owned()),
    })
}

/// Parses a bare non-negative decimal with at most four fraction digits.
pub fn parse_decimal(number: &str) -> Result<u64, AmountError> {
    let parsed = parse_fixed(number)?;
    u64::try_from(parsed).map_err(|_| AmountError::Overflow(number.to_owned()))
}

/// Parses a non-negative decimal with at most four fraction digits into
/// `u128` units. Inverse of [`format_fixed`].
pub fn parse_fixed(number: &str) -> Result<u128, AmountError> {
    let fail = || AmountError::Format(number.to_owned());
    let (int_part, frac_part) = match number.split_once('.') {
        Some((i, f)) => (i, f),
        None => (number, ""),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(fail());
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(fail());
    }
    if number.contains('.') && frac_part.is_empty() {
        return Err(fail());
    }
    if frac_part.len() > EOS_PRECISION as usize {
        return Err(AmountError::Precision(number.to_owned()));
    }
    let overflow = || AmountError::Overflow(number.to_owned());
    let whole: u128 = int_part.parse().map_err(|_| overflow())?;
    let mut frac: u128 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| fail())?
    };
    for _ in frac_part.len()..EOS_PRECISION as usize {
        frac *= 10;
    }
    whole
        .checked_mul(UNITS_PER_EOS as u128)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(overflow)
}

/// Formats units as a decimal with exactly four fraction digits.
pub fn format_fixed(units: u128) -> String {
    let per = UNITS_PER_EOS as u128;
    format!("{}.{:04}", units / per, units % per)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scales_to_units() {
        assert_eq!(parse_quantity("1.5000 EOS"), Ok(15_000));
        assert_eq!(parse_quantity("1.5 EOS"), Ok(15_000));
        assert_eq!(parse_quantity("0.0001 EOS"), Ok(1));
        assert_eq!(parse_quantity("42 EOS"), Ok(420_000));
        assert_eq!(parse_quantity("0.0000 EOS"), Ok(0));
    }

    #[test]
    fn rejects_bad_quantities() {
        assert!(matches!(
            parse_quantity("1.00001 EOS"),
            Err(AmountError::Precision(_))
        ));
        for q in ["1.0000", "1.0000 SYS", "-1.0000 EOS", "abc EOS", "1. EOS", ".5 EOS", ""] {
            assert!(matches!(parse_quantity(q), Err(AmountError::Format(_))), "{q}");
        }
        assert!(matches!(
            parse_quantity("99999999999999999999 EOS"),
            Err(AmountError::Overflow(_))
        ));
    }

    #[test]
    fn formats_four_decimals() {
        assert_eq!(format_fixed(15_000), "1.5000");
        assert_eq!(format_fixed(1), "0.0001");
        assert_eq!(format_fixed(0), "0.0000");
    }

    proptest! {
        #[test]
        fn fixed_round_trip(units in any::<u128>()) {
            // Keep clear of the multiplication overflow edge.
            let units = units / 10_000;
            prop_assert_eq!(parse_fixed(&format_fixed(units)), Ok(units));
        }
    }
}
