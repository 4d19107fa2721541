#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

/// Reference small-`y` coefficients in factored form:
/// (sign, numerator factors, denominator prime powers).
type Factored = (i8, &'static [u64], &'static [(u64, u32)]);

const D2: (u64, u32) = (2, 0);

pub const MEAN_COEFFS: [Factored; 20] = [
    (1, &[1], &[D2]),
    (-1, &[1], &[(2, 2)]),
    (1, &[1], &[(2, 2), (3, 1)]),
    (-1, &[7], &[(2, 5), (3, 2)]),
    (1, &[17], &[(2, 6), (3, 2), (5, 1)]),
    (-1, &[619], &[(2, 8), (3, 4), (5, 2)]),
    (1, &[41], &[(2, 7), (3, 2), (5, 2), (7, 1)]),
    (-1, &[4001], &[(2, 12), (3, 3), (5, 2), (7, 2)]),
    (1, &[173, 313], &[(2, 14), (3, 6), (5, 2), (7, 2)]),
    (-1, &[17, 62687], &[(2, 16), (3, 8), (5, 3), (7, 2)]),
    (1, &[2823631], &[(2, 15), (3, 8), (5, 4), (7, 2), (11, 1)]),
    (-1, &[941, 407219], &[(2, 19), (3, 10), (5, 4), (7, 2), (11, 2)]),
    (1, &[6377893], &[(2, 17), (3, 9), (5, 3), (7, 2), (11, 2), (13, 1)]),
    (-1, &[11657, 1658989], &[(2, 22), (3, 10), (5, 4), (7, 3), (11, 2), (13, 2)]),
    (1, &[179, 257, 139493], &[(2, 20), (3, 11), (5, 4), (7, 4), (11, 2), (13, 2)]),
    (-1, &[37, 23593, 1363963], &[(2, 27), (3, 11), (5, 6), (7, 4), (11, 2), (13, 2)]),
    (1, &[43, 863, 701781161], &[(2, 30), (3, 12), (5, 6), (7, 4), (11, 2), (13, 2), (17, 1)]),
    (-1, &[23, 5264671, 6578291], &[(2, 32), (3, 14), (5, 6), (7, 4), (11, 2), (13, 2), (17, 2)]),
    (1, &[1077161, 39636029], &[(2, 31), (3, 15), (5, 4), (7, 4), (11, 2), (13, 2), (17, 2), (19, 1)]),
    (-1, &[229, 5189, 247913, 1229957], &[(2, 35), (3, 15), (5, 8), (7, 4), (11, 2), (13, 2), (17, 2), (19, 2)]),
];

pub const VAR_COEFFS: [Factored; 20] = [
    (1, &[1], &[D2]),
    (-1, &[3], &[(2, 2)]),
    (1, &[17], &[(2, 2), (3, 2)]),
    (-1, &[67], &[(2, 5), (3, 2)]),
    (1, &[269], &[(2, 6), (3, 2), (5, 1)]),
    (-1, &[13, 19, 67], &[(2, 8), (3, 4), (5, 2)]),
    (1, &[3491], &[(2, 7), (3, 4), (5, 1), (7, 1)]),
    (-1, &[1064243], &[(2, 12), (3, 4), (5, 2), (7, 2)]),
    (1, &[28638487], &[(2, 14), (3, 7), (5, 2), (7, 2)]),
    (-1, &[41, 557, 17257], &[(2, 16), (3, 8), (5, 3), (7, 2)]),
    (1, &[37, 61924123], &[(2, 15), (3, 8), (5, 4), (7, 2), (11, 1)]),
    (-1, &[17, 29, 286954607], &[(2, 19), (3, 10), (5, 3), (7, 2), (11, 2)]),
    (1, &[206619709873], &[(2, 16), (3, 10), (5, 4), (7, 2), (11, 2), (13, 1)]),
    (-1, &[199735173503123], &[(2, 22), (3, 10), (5, 4), (7, 3), (11, 2), (13, 2)]),
    (1, &[479147, 50402324263], &[(2, 21), (3, 12), (5, 6), (7, 4), (11, 2), (13, 2)]),
    (-1, &[59, 163363, 7608612619], &[(2, 27), (3, 11), (5, 6), (7, 4), (11, 2), (13, 2)]),
    (1, &[27057479, 146285342603], &[(2, 30), (3, 12), (5, 6), (7, 4), (11, 2), (13, 2), (17, 1)]),
    (-1, &[307, 972530242052278499], &[(2, 32), (3, 14), (5, 6), (7, 4), (11, 2), (13, 2), (17, 2)]),
    (1, &[61, 83, 709, 7309, 37338914351], &[(2, 31), (3, 15), (5, 6), (7, 4), (11, 2), (13, 2), (17, 2), (19, 1)]),
    (-1, &[239, 1181, 2161, 263188412702251], &[(2, 35), (3, 15), (5, 7), (7, 4), (11, 2), (13, 2), (17, 2), (19, 2)]),
];

pub fn rational(entry: &Factored) -> BigRational {
    let (sign, numerator, denominator) = *entry;
    let num: BigInt = numerator.iter().map(|&f| BigInt::from(f)).product();
    let den: BigInt = denominator.iter().map(|&(p, e)| BigInt::from(p).pow(e)).product();
    BigRational::new(num * BigInt::from(sign), den)
}
