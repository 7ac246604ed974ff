//! Adaptive Gauss-Kronrod integration on finite intervals.
//!
//! Every panel is evaluated with an embedded Gauss/Kronrod pair sharing the
//! same nodes; the absolute difference of the two sums is the panel's error
//! estimate. The worst panel is bisected until the accumulated estimate meets
//! the tolerance or the subdivision budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("invalid interval: lower limit {a} exceeds upper limit {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
}

/// Tolerances and limits for [`integrate_adaptive`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of panels per call.
    pub max_subdivisions: usize,
    /// Number of Kronrod nodes per panel: 15, 21 or 31.
    pub panel_order: usize,
    /// Cutoff policy for the sinc integral: at most this many lobes are
    /// integrated numerically before the tail is handled analytically.
    pub max_lobes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            panel_order: 15,
            max_lobes: 1_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(QuadratureError::InvalidConfig(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(QuadratureError::InvalidConfig(format!(
                "rel_tol must be non-negative, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if self.max_lobes == 0 {
            return Err(QuadratureError::InvalidConfig(
                "max_lobes must be at least 1".into(),
            ));
        }
        rule_for(self.panel_order).map(|_| ())
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Accumulated absolute Gauss/Kronrod discrepancy over all panels.
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

struct Rule {
    /// Kronrod abscissae on [0, 1], descending; the last entry is the centre.
    xgk: &'static [f64],
    /// Gauss weights for the nodes `xgk[1], xgk[3], ...` (and the centre when
    /// the Gauss order is odd).
    wg: &'static [f64],
    wgk: &'static [f64],
}

#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG15: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG21: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const XGK31: [f64; 16] = [
    0.998_002_298_693_397_060_285_172_840_152_271,
    0.987_992_518_020_485_428_489_565_718_586_613,
    0.967_739_075_679_139_134_257_347_978_784_337,
    0.937_273_392_400_705_904_307_758_947_710_209,
    0.897_264_532_344_081_900_882_509_656_454_496,
    0.848_206_583_410_427_216_200_648_320_774_217,
    0.790_418_501_442_465_932_967_649_294_817_947,
    0.724_417_731_360_170_047_416_186_054_613_938,
    0.650_996_741_297_416_970_533_735_895_313_275,
    0.570_972_172_608_538_847_537_226_737_253_911,
    0.485_081_863_640_239_680_693_655_740_232_351,
    0.394_151_347_077_563_369_897_207_370_981_045,
    0.299_180_007_153_168_812_166_780_024_266_389,
    0.201_194_093_997_434_522_300_628_303_394_596,
    0.101_142_066_918_717_499_027_074_231_447_392,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG31: [f64; 8] = [
    0.030_753_241_996_117_268_354_628_393_577_204,
    0.070_366_047_488_108_124_709_267_416_450_667,
    0.107_159_220_467_171_935_011_869_546_685_869,
    0.139_570_677_926_154_314_447_804_794_511_028,
    0.166_269_205_816_993_933_553_200_860_481_209,
    0.186_161_000_015_562_211_026_800_561_866_423,
    0.198_431_485_327_111_576_456_118_326_443_839,
    0.202_578_241_925_561_272_880_620_199_967_519,
];
#[allow(clippy::excessive_precision)]
const WGK31: [f64; 16] = [
    0.005_377_479_872_923_348_987_792_051_430_128,
    0.015_007_947_329_316_122_538_374_763_075_807,
    0.025_460_847_326_715_320_186_874_001_019_653,
    0.035_346_360_791_375_846_222_037_948_478_360,
    0.044_589_751_324_764_876_608_227_299_373_280,
    0.053_481_524_690_928_087_265_343_147_239_430,
    0.062_009_567_800_670_640_285_139_230_960_803,
    0.069_854_121_318_728_258_709_520_077_099_147,
    0.076_849_680_757_720_378_894_432_777_482_659,
    0.083_080_502_823_133_021_038_289_247_286_104,
    0.088_564_443_056_211_770_647_275_443_693_774,
    0.093_126_598_170_825_321_225_486_872_747_346,
    0.096_642_726_983_623_678_505_179_907_627_589,
    0.099_173_598_721_791_959_332_393_173_484_603,
    0.100_769_845_523_875_595_044_946_662_617_570,
    0.101_330_007_014_791_549_017_374_792_767_493,
];

fn rule_for(order: usize) -> Result<Rule, QuadratureError> {
    match order {
        15 => Ok(Rule {
            xgk: &XGK15,
            wg: &WG15,
            wgk: &WGK15,
        }),
        21 => Ok(Rule {
            xgk: &XGK21,
            wg: &WG21,
            wgk: &WGK21,
        }),
        31 => Ok(Rule {
            xgk: &XGK31,
            wg: &WG31,
            wgk: &WGK31,
        }),
        other => Err(QuadratureError::InvalidConfig(format!(
            "unsupported panel order {other} (expected 15, 21 or 31)"
        ))),
    }
}

/// Degree of polynomials integrated exactly by the Kronrod rule of a panel.
pub fn exactness_degree(panel_order: usize) -> Option<usize> {
    match panel_order {
        15 => Some(22),
        21 => Some(31),
        31 => Some(46),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadratureError> {
    let value = f(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QuadratureError::NonFinite { x, value })
    }
}

fn apply_rule<F: Fn(f64) -> f64>(
    f: &F,
    rule: &Rule,
    a: f64,
    b: f64,
) -> Result<Panel, QuadratureError> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let n = rule.xgk.len();
    let f_centre = eval(f, centre)?;

    // The centre is a Gauss node only when the Gauss rule has odd order.
    let gauss_has_centre = n.is_multiple_of(2);
    let mut gauss = if gauss_has_centre {
        f_centre * rule.wg[rule.wg.len() - 1]
    } else {
        0.0
    };
    let mut kronrod = f_centre * rule.wgk[n - 1];
    let mut abs_sum = kronrod.abs();

    for j in 0..n - 1 {
        let dx = half * rule.xgk[j];
        let f1 = eval(f, centre - dx)?;
        let f2 = eval(f, centre + dx)?;
        kronrod += rule.wgk[j] * (f1 + f2);
        abs_sum += rule.wgk[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += rule.wg[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod * half;
    let discrepancy = ((kronrod - gauss) * half).abs();
    // Floor at the rounding level of the panel sum.
    let roundoff = 20.0 * f64::EPSILON * abs_sum * half.abs();
    Ok(Panel {
        a,
        b,
        value,
        error: discrepancy.max(roundoff),
    })
}

/// Integrates `f` over `[a, b]` by worst-panel-first bisection.
pub fn integrate_adaptive<F>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_partitioned(f, &[a, b], cfg)
}

/// Like [`integrate_adaptive`] but starts from the panels delimited by the
/// strictly increasing `points`. Useful when the integrand is concentrated
/// on a scale the initial panel cannot resolve.
pub fn integrate_partitioned<F>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let rule = rule_for(cfg.panel_order)?;
    if points.len() < 2 {
        return Err(QuadratureError::InvalidConfig(
            "at least two partition points are required".into(),
        ));
    }
    for w in points.windows(2) {
        if !(w[0] <= w[1]) {
            return Err(QuadratureError::InvalidInterval { a: w[0], b: w[1] });
        }
    }
    let (a, b) = (points[0], points[points.len() - 1]);
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 1,
            converged: true,
        });
    }

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2).filter(|w| w[0] < w[1]) {
        let panel = apply_rule(&f, &rule, w[0], w[1])?;
        value += panel.value;
        error += panel.error;
        heap.push(panel);
    }

    while error > cfg.tolerance_for(value) {
        if heap.len() >= cfg.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let left = apply_rule(&f, &rule, worst.a, mid)?;
        let right = apply_rule(&f, &rule, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the panels to shed drift from the running updates.
    let (mut value, mut error) = (0.0, 0.0);
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        panels_used: panels.len(),
        converged: error <= cfg.tolerance_for(value),
    })
}
