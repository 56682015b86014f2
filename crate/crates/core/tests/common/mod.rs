//! Values frozen from `reference/reference.py`, an independent mpmath
//! implementation run at 1400 bits; 40 significant digits each.
#![allow(dead_code)]

use qfreud::QContext;
use rug::{Complex, Float};

/// `(1/2; 1/2)_inf`.
pub const POCH_HALF_HALF: &str = "0.2887880950866024212788997219292307800889";

const TABLE: &[(&str, &str, &str)] = &[
    ("0.3", "c1", "-3.525760031641369639443093714611086578706"),
    ("0.3", "m0", "1.870741989196177813367472949096982584269"),
    ("0.3", "alpha1", "0.7178202866155629188609031788263089077005"),
    ("0.3", "alpha2", "2.532761198528472013502183598689944100066"),
    ("0.3", "alpha3", "10.0565173930626716936222489391548269903"),
    ("0.3", "alpha4", "34.48480400627275266893937644375354935648"),
    ("0.3", "alpha5", "119.84553138253995957527899260783478045"),
    ("0.3", "alpha6", "403.111972385045572820182943047092454317"),
    ("0.3", "A", "0.8003092298749035914650402604859752809981"),
    ("0.3", "B", "0.3748551045036592009496189091255733173843"),
    ("0.3", "eta1", "0.5311694007778155940970084998056275038241"),
    ("0.3", "eta2", "2.363990987810088485597774214329367171875"),
    ("0.3", "eta3", "0.7091972963430265456793322642988101515625"),
    ("0.3", "eta4", "-0.4337883439685494018458902748412624614563"),
    ("0.3", "lambda1", "1.445961146561831339486300916137541538188"),
    ("0.3", "lambda2", "7.879969959366961618659247381097890572917"),
    ("0.3", "lambda3", "-1.770564669259385313656694999352091679414"),
    ("0.3", "lambda4", "2.363990987810088485597774214329367171875"),
    ("0.3", "mu1", "-0.5964847347504119002704796245015091553033"),
    ("0.3", "mu2", "1.472143426087044366614417355172121640061"),
    ("0.3", "mu3", "7.010206790890687460068654072248198286007"),
    ("0.3", "mu4", "1.391797714417627767297785790503521362374"),
    ("0.3", "c_psi", "1.472143426087044366614417355172121640061"),
    ("0.3", "calH", "1.30199803251306591859634548595318785365"),
    ("0.3", "c0", "0.7680503157672511437503171884997693963285"),
    ("0.5", "c1", "-5.389914928406394875729888453530194816642"),
    ("0.5", "m0", "2.983523671421382041152646060996735361307"),
    ("0.5", "alpha1", "0.5570581720320345069418442267998832840277"),
    ("0.5", "alpha2", "1.238086482882916504835992941023195471895"),
    ("0.5", "alpha3", "3.051043461143665745489851647554758175683"),
    ("0.5", "alpha4", "6.559232755912816716125428145733492587553"),
    ("0.5", "alpha5", "14.06998039928981996687489628754359697733"),
    ("0.5", "alpha6", "29.16171018169188454546919716655770710735"),
    ("0.5", "A", "0.4164711105205733807442133395230293097361"),
    ("0.5", "B", "1.200563466154996003505988158726887312"),
    ("0.5", "eta1", "2.250504770032717236988811789944240435672"),
    ("0.5", "eta2", "7.224241396322517105339561224028056811558"),
    ("0.5", "eta3", "3.612120698161258552669780612014028405779"),
    ("0.5", "eta4", "-0.5626261925081793092472029474860601089181"),
    ("0.5", "lambda1", "1.125252385016358618494405894972120217836"),
    ("0.5", "lambda2", "14.44848279264503421067912244805611362312"),
    ("0.5", "lambda3", "-4.501009540065434473977623579888480871345"),
    ("0.5", "lambda4", "7.224241396322517105339561224028056811558"),
    ("0.5", "mu1", "-0.8847008016641567252486625727788073077912"),
    ("0.5", "mu2", "2.384231029031371724149899288678397238772"),
    ("0.5", "mu3", "9.536924116125486896599597154713588955086"),
    ("0.5", "mu4", "0.8847008016641567252486625727788073077912"),
    ("0.5", "c_psi", "2.384231029031371724149899288678397238772"),
    ("0.5", "calH", "0.3948845299633144655355069120954080316487"),
    ("0.5", "c0", "2.532385859970006747905076578699842171688"),
    ("0.7", "c1", "-9.629478349159349666089123954406604571352"),
    ("0.7", "m0", "5.202319337892010855361156712211940554843"),
    ("0.7", "alpha1", "0.4026351832656287645900588999828007246857"),
    ("0.7", "alpha2", "0.6617810584930776525801782573687984071442"),
    ("0.7", "alpha3", "1.182369832563268515543190894557306028844"),
    ("0.7", "alpha4", "1.881062865417055124349205439052230277092"),
    ("0.7", "alpha5", "2.949743575339755782084731358616312251309"),
    ("0.7", "alpha6", "4.49676760014088361790179179531912562549"),
    ("0.7", "A", "0.05205479215181815648612320365472207343062"),
    ("0.7", "B", "13.44736903296905352779158109618671943538"),
    ("0.7", "eta1", "33.56228012907156522625910517248057047676"),
    ("0.7", "eta2", "89.5855155203961575757689680585589918644"),
    ("0.7", "eta3", "62.70986086427731030303827764099129430508"),
    ("0.7", "eta4", "-2.157575151154600621688085332516608102077"),
    ("0.7", "lambda1", "3.082250215935143745268693332166583002968"),
    ("0.7", "lambda2", "127.9793078862802251082413829407985598063"),
    ("0.7", "lambda3", "-47.94611447010223603751300738925795782394"),
    ("0.7", "lambda4", "89.5855155203961575757689680585589918644"),
    ("0.7", "mu1", "-2.492684986522233491594343464256960340591"),
    ("0.7", "mu2", "7.20097683269712382040942826944413880368"),
    ("0.7", "mu3", "34.29036586998630390671156318782923239848"),
    ("0.7", "mu4", "1.068293565652385782111861484681554431682"),
    ("0.7", "c_psi", "7.20097683269712382040942826944413880368"),
    ("0.7", "calH", "0.009666753634975237723016215638711942775095"),
    ("0.7", "c0", "103.4473451751066160086806783252700967241"),
];

pub fn reference(q: &str, name: &str) -> Float {
    let (_, _, v) = TABLE
        .iter()
        .find(|(tq, tn, _)| *tq == q && *tn == name)
        .unwrap_or_else(|| panic!("no frozen value for {name} at q = {q}"));
    Float::with_val(256, Float::parse(v).unwrap())
}

/// Relative difference of a real value against a frozen one.
pub fn rel_to_ref(x: &Float, q: &str, name: &str) -> f64 {
    let r = reference(q, name);
    let d = Float::with_val(256, x - &r);
    (d / r).abs().to_f64()
}

/// Relative difference of a complex value against a frozen real one.
pub fn crel_to_ref(z: &Complex, q: &str, name: &str) -> f64 {
    let r = reference(q, name);
    let d = Complex::with_val(256, z - &r);
    let n = qfreud::qcore::cabs(&d);
    (n / r).abs().to_f64()
}

pub fn ctx(q: &str) -> QContext {
    QContext::new(q, 1024).unwrap()
}

pub const QS: [&str; 3] = ["0.3", "0.5", "0.7"];

/// 40 digits less a safety margin for the last-place rounding of the table.
pub const REF_TOL: f64 = 1e-37;
