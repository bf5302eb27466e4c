//! Extremal-phase Daubechies scaling filters.
//!
//! Coefficients were obtained by spectral factorization in 60-digit
//! arithmetic and rounded to 22 significant digits; `h[0]` is the leading
//! tap of the minimum-phase factor (for N = 2, `(1 + √3) / (4√2)`).

use crate::error::{Error, Result};

/// Orthonormal two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
    vanishing_moments: usize,
}

impl FilterPair {
    /// Builds the pair from a scaling filter. The highpass is its quadrature
    /// mirror `g[k] = (-1)^k h[L-1-k]`.
    pub fn from_lowpass(lowpass: Vec<f64>, vanishing_moments: usize) -> Result<Self> {
        if lowpass.len() < 2 || !lowpass.len().is_multiple_of(2) {
            return Err(Error::param("scaling filter length must be even and at least 2"));
        }
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        Ok(Self {
            lowpass,
            highpass,
            vanishing_moments,
        })
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn vanishing_moments(&self) -> usize {
        self.vanishing_moments
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

/// Daubechies extremal-phase filter with `vanishing_moments` null moments
/// (length `2 * vanishing_moments`). N = 1 is the Haar filter.
pub fn daubechies_filter(vanishing_moments: usize) -> Result<FilterPair> {
    let taps: &[f64] = match vanishing_moments {
        1 => &DB1,
        2 => &DB2,
        3 => &DB3,
        4 => &DB4,
        5 => &DB5,
        6 => &DB6,
        7 => &DB7,
        8 => &DB8,
        9 => &DB9,
        10 => &DB10,
        n => {
            return Err(Error::param(format!(
                "vanishing moments must be in 1..=10, got {n}"
            )))
        }
    };
    FilterPair::from_lowpass(taps.to_vec(), vanishing_moments)
}

const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

#[allow(clippy::excessive_precision)]
const DB2: [f64; 4] = [
    0.4829629131445341433749,
    0.8365163037378079055753,
    0.2241438680420133810260,
    -0.1294095225512603811744,
];

#[allow(clippy::excessive_precision)]
const DB3: [f64; 6] = [
    0.3326705529500826159985,
    0.8068915093110925764945,
    0.4598775021184915700952,
    -0.1350110200102545886964,
    -0.08544127388202666169282,
    0.03522629188570953660274,
];

#[allow(clippy::excessive_precision)]
const DB4: [f64; 8] = [
    0.2303778133088965008633,
    0.7148465705529156470899,
    0.6308807679298589078817,
    -0.02798376941685985421141,
    -0.1870348117190930840796,
    0.03084138183556076362722,
    0.03288301166688519973541,
    -0.01059740178506903210488,
];

#[allow(clippy::excessive_precision)]
const DB5: [f64; 10] = [
    0.1601023979741929144807,
    0.6038292697971896705401,
    0.7243085284377729277281,
    0.1384281459013207315054,
    -0.2422948870663820318626,
    -0.03224486958463837464848,
    0.07757149384004571352313,
    -0.006241490212798274274191,
    -0.01258075199908199946851,
    0.003335725285473771277998,
];

#[allow(clippy::excessive_precision)]
const DB6: [f64; 12] = [
    0.1115407433501094636213,
    0.4946238903984530856772,
    0.7511339080210953506789,
    0.3152503517091976290860,
    -0.2262646939654398200763,
    -0.1297668675672619355623,
    0.09750160558732304910234,
    0.02752286553030572862554,
    -0.03158203931748602956508,
    0.0005538422011614961392519,
    0.004777257510945510639636,
    -0.001077301085308479564853,
];

#[allow(clippy::excessive_precision)]
const DB7: [f64; 14] = [
    0.07785205408500917901996,
    0.3965393194819173065390,
    0.7291320908462351199169,
    0.4697822874051931224716,
    -0.1439060039285649754051,
    -0.2240361849938749826381,
    0.07130921926683026475088,
    0.08061260915108307191292,
    -0.03802993693501441357959,
    -0.01657454163066688065411,
    0.01255099855609984061299,
    0.0004295779729213665211321,
    -0.001801640704047490915268,
    0.0003537137999745202484463,
];

#[allow(clippy::excessive_precision)]
const DB8: [f64; 16] = [
    0.05441584224310400995501,
    0.3128715909142999706592,
    0.6756307362972898068078,
    0.5853546836542067127713,
    -0.01582910525634930566738,
    -0.2840155429615469265162,
    0.0004724845739132827703606,
    0.1287474266204784588570,
    -0.01736930100180754616962,
    -0.04408825393079475150676,
    0.01398102791739828164872,
    0.008746094047405776716383,
    -0.004870352993451574310422,
    -0.0003917403733769470462981,
    0.0006754494064505693663695,
    -0.0001174767841247695337306,
];

#[allow(clippy::excessive_precision)]
const DB9: [f64; 18] = [
    0.03807794736387834658870,
    0.2438346746125903537320,
    0.6048231236901111119031,
    0.6572880780513005380782,
    0.1331973858250075761910,
    -0.2932737832791749088064,
    -0.09684078322297646051351,
    0.1485407493381063801351,
    0.03072568147933337921232,
    -0.06763282906132997367564,
    0.0002509471148314519575872,
    0.02236166212367909720537,
    -0.004723204757751397277926,
    -0.004281503682463429834497,
    0.001847646883056226476619,
    0.0002303857635231959672052,
    -0.0002519631889427101369750,
    0.00003934732031627159948069,
];

#[allow(clippy::excessive_precision)]
const DB10: [f64; 20] = [
    0.02667005790055555358662,
    0.1881768000776914890209,
    0.5272011889317255864817,
    0.6884590394536035657419,
    0.2811723436605774607487,
    -0.2498464243273153794161,
    -0.1959462743773770435043,
    0.1273693403357932600827,
    0.09305736460357235116035,
    -0.07139414716639708714534,
    -0.02945753682187581285828,
    0.03321267405934100173976,
    0.003606553566956169655423,
    -0.01073317548333057504432,
    0.001395351747052901165789,
    0.001992405295185056117159,
    -0.0006858566949597116265614,
    -0.0001164668551292854509515,
    0.00009358867032006959133405,
    -0.00001326420289452124481244,
];
