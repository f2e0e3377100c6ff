#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lbsim {

namespace detail {

// Two-sided Student-t quantiles t_{nu, p}, nu = 1..120; beyond 120 the
// normal quantile is used. Values frozen from a reference statistics
// package so the CI math is bit-exact across platforms.
inline constexpr double kT95[120] = {
    6.31375151480093, 2.91998558035552, 2.35336343480183, 2.13184678632665,
    2.01504837333302, 1.9431802805153, 1.8945786050613, 1.85954803752284,
    1.83311293265363, 1.81246112281073, 1.79588481870367, 1.78228755564916,
    1.7709333959868, 1.76131013577486, 1.75305035569255, 1.74588367627624,
    1.73960672607507, 1.73406360661754, 1.72913281152137, 1.72471824292079,
    1.72074290281188, 1.71714437438024, 1.71387152774705, 1.71088207990943,
    1.7081407612519, 1.70561791975927, 1.70328844572213, 1.70113093426593,
    1.6991270265335, 1.69726088659396, 1.69551878254587, 1.69388874838371,
    1.69236030903034, 1.69092425518685, 1.68957245778027, 1.68829771411682,
    1.68709361959626, 1.68595446016674, 1.68487512171122, 1.68385101333565,
    1.68287800213271, 1.68195235746753, 1.68107070320252, 1.68022997657212,
    1.67942739265235, 1.67866041355687, 1.67792672164186, 1.67722419612434,
    1.67655089261685, 1.6759050251631, 1.67528495042491, 1.67468915372603,
    1.6741162367031, 1.67356490635216, 1.67303396528991, 1.67252230307558,
    1.67202888846095, 1.67155276245486, 1.67109303210389, 1.67064886490464,
    1.67021948377374, 1.66980416251201, 1.66940222170681, 1.66901302502409,
    1.66863597584755, 1.66827051422763, 1.66791611410742, 1.66757228079671,
    1.66723854866855, 1.66691447905596, 1.66659965832853, 1.66629369613154,
    1.66599622377143, 1.66570689273402, 1.66542537340153, 1.6651513534786,
    1.66488453732743, 1.66462464457151, 1.6643714091975, 1.6641245785297,
    1.66388391286625, 1.66364918397609, 1.66342017486902, 1.66319667900196,
    1.66297849965766, 1.66276544936734, 1.6625573493735, 1.66235402912971,
    1.66215532583456, 1.66196108399694, 1.66177115503026, 1.66158539687348,
    1.66140367363671, 1.6612258552698, 1.66105181725191, 1.6608814403008,
    1.6607146101002, 1.66055121704406, 1.66039115599639, 1.66023432606575,
    1.66008063039315, 1.6599299759526, 1.65978227336336, 1.65963743671314,
    1.65949538339146, 1.65935603393256, 1.65921931186714, 1.65908514358251,
    1.65895345819036, 1.65882418740194, 1.65869726540997, 1.65857262877692,
    1.65845021632932, 1.65832996905764, 1.65821183002143, 1.65809574425946,
    1.65798165870444, 1.65786952210214, 1.65775928493464, 1.65765089934738,
};
inline constexpr double kNorm95 = 1.64485362695147;

inline constexpr double kT975[120] = {
    12.7062047364321, 4.30265272969614, 3.18244630528426, 2.7764451051978,
    2.57058183563631, 2.44691185114497, 2.36462425159278, 2.30600413520417,
    2.2621571628541, 2.22813885196494, 2.20098516008295, 2.17881282966342,
    2.16036865646101, 2.14478668791693, 2.13144954555932, 2.11990529922101,
    2.10981557783318, 2.10092204024096, 2.09302405440826, 2.08596344726584,
    2.07961384472766, 2.07387306790401, 2.06865761041904, 2.06389856162802,
    2.05953855275329, 2.05552943864287, 2.05183051648028, 2.04840714179524,
    2.0452296421327, 2.04227245630124, 2.03951344639641, 2.0369333434601,
    2.03451529744934, 2.03224450931772, 2.03010792825034, 2.02809400098045,
    2.02619246302911, 2.02439416391197, 2.02269092003676, 2.02107539030627,
    2.01954097044138, 2.01808170281844, 2.01669219922782, 2.01536757444376,
    2.01410338888085, 2.01289559891943, 2.01174051372977, 2.01063475762423,
    2.00957523712924, 2.00855911210076, 2.00758377031584, 2.00664680506169,
    2.00574599531787, 2.00487928818806, 2.00404478328915, 2.00324071884787,
    2.00246545929101, 2.00171748414524, 2.00099537808827, 2.00029782201426,
    1.99962358499494, 1.99897151703338, 1.99834054252074, 1.99772965431769,
    1.997137908392, 1.99656441895231, 1.9960083540253, 1.99546893142984,
    1.99494541510724, 1.99443711177119, 1.99394336784563, 1.99346356666187,
    1.99299712588985, 1.99254349518093, 1.99210215400224, 1.99167260964466,
    1.99125439538838, 1.99084706881169, 1.99045021023013, 1.99006342125445,
    1.9896863234569, 1.98931855713657, 1.98895978017516, 1.98860966697571,
    1.98826790747722, 1.98793420623902, 1.98760828158907, 1.98728986483117,
    1.98697869950628, 1.98667454070377, 1.98637715441862, 1.98608631695113,
    1.98580181434582, 1.9855234418666, 1.98525100350919, 1.98498431153102,
    1.98472318602712, 1.98446745442669, 1.98421695150868, 1.98397151844963,
    1.98373100288528, 1.98349525849594, 1.98326414470971, 1.98303752642299,
    1.98281527373715, 1.98259726171029, 1.98238337012302, 1.98217348325745,
    1.98196748968847, 1.98176528208651, 1.98156675703107, 1.9813718148344,
    1.98118035937458, 1.98099229793751, 1.9808075410672, 1.98062600242394,
    1.98044759864973, 1.98027224924071, 1.98009987642601, 1.97993040505278,
};
inline constexpr double kNorm975 = 1.95996398454005;

inline constexpr double kT995[120] = {
    63.656741162874, 9.92484320091807, 5.84090930973335, 4.6040948714159,
    4.03214298355754, 3.70742802132491, 3.4994832973505, 3.3553873313334,
    3.24983554159213, 3.16927267261695, 3.10580651553928, 3.0545395893929,
    3.01227583871658, 2.97684273437083, 2.94671288348595, 2.92078162249604,
    2.89823051963472, 2.87844047271359, 2.86093460644991, 2.84533970977681,
    2.83135955801719, 2.81875606059637, 2.80733568376752, 2.7969395047728,
    2.78743581367585, 2.77871453332891, 2.77068295712168, 2.76326245546107,
    2.75638590367033, 2.74999565356703, 2.74404191929413, 2.73848148201208,
    2.73327664235076, 2.72839436707066, 2.72380558920805, 2.71948463044997,
    2.71540872154996, 2.71155760191306, 2.70791318351765, 2.70445926743315,
    2.70118130357851, 2.69806618621998, 2.69510207915767, 2.69227826569302,
    2.68958501937464, 2.68701349224221, 2.68455561786652, 2.68220402695021,
    2.67995197363155, 2.67779327094084, 2.67572223411065, 2.67373363064722,
    2.671822636241, 2.66998479573489, 2.66821598848619, 2.66651239755606,
    2.66487048224197, 2.66328695353766, 2.66175875216297, 2.66028302885504,
    2.65885712665393, 2.65747856495116, 2.65614502509986, 2.65485433741108,
    2.65360446938292, 2.65239351502832, 2.65121968518366, 2.65008129869473,
    2.64897677438863, 2.64790462375115, 2.64686344423839, 2.64585191315933,
    2.64486878207338, 2.64391287165309, 2.64298306696739, 2.64207831314599,
    2.64119761138927, 2.64034001529213, 2.63950462745322, 2.63869059634418,
    2.63789711341578, 2.63712341042037, 2.63636875693212, 2.63563245804796,
    2.63491385225431, 2.63421230944563, 2.6335272290825, 2.63285803847764,
    2.63220419120001, 2.63156516558716, 2.63094046335776, 2.63032960831629,
    2.62973214514283, 2.6291476382617, 2.62857567078274, 2.62801584351007,
    2.62746777401325, 2.62693109575637, 2.62640545728083, 2.62589052143802,
    2.62538596466844, 2.62489147632391, 2.62440675802996, 2.6239315230856,
    2.62346549589808, 2.62300841145002, 2.62256001479703, 2.62212006059369,
    2.62168831264598, 2.6212645434886, 2.62084853398544, 2.62044007295184,
    2.6200389567972, 2.61964498918665, 2.61925798072077, 2.61887774863197,
    2.6185041164968, 2.61813691396306, 2.61777597649086, 2.61742114510687,
};
inline constexpr double kNorm995 = 2.5758293035489;

}  // namespace detail

// t_{nu, 1-alpha/2} for confidence in {0.90, 0.95, 0.99}.
inline double t_quantile(int nu, double confidence) {
    if (nu < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
    const double* table;
    double norm;
    if (confidence == 0.90) {
        table = detail::kT95;
        norm = detail::kNorm95;
    } else if (confidence == 0.95) {
        table = detail::kT975;
        norm = detail::kNorm975;
    } else if (confidence == 0.99) {
        table = detail::kT995;
        norm = detail::kNorm995;
    } else {
        throw std::invalid_argument(
            "confidence must be one of 0.90, 0.95, 0.99");
    }
    return nu <= 120 ? table[nu - 1] : norm;
}

struct PrecisionTarget {
    double confidence = 0.95;
    double relative_halfwidth = 0.01;
    int min_batches = 30;
    long batch_size = 2000;  // jobs per batch
};

// mean and t-based CI half-width of a set of batch means.
inline std::pair<double, double> ci_halfwidth(
    const std::vector<double>& batch_means, double confidence) {
    const std::size_t n = batch_means.size();
    if (n < 2) throw std::invalid_argument("need at least 2 batch means");
    double mean = 0.0;
    for (double m : batch_means) mean += m;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double m : batch_means) ss += (m - mean) * (m - mean);
    double s = std::sqrt(ss / static_cast<double>(n - 1));
    double hw = t_quantile(static_cast<int>(n) - 1, confidence) * s /
                std::sqrt(static_cast<double>(n));
    return {mean, hw};
}

// Groups consecutive job responses into fixed-size batches; the first
// completed batch is discarded as warm-up.
class BatchAccumulator {
public:
    explicit BatchAccumulator(long batch_size) : batch_size_(batch_size) {
        if (batch_size <= 0)
            throw std::invalid_argument("batch size must be positive");
    }

    void record_response(double response_s) {
        if (response_s < 0.0)
            throw std::logic_error("negative response time");
        total_sum_ += response_s;
        ++total_count_;
        batch_sum_ += response_s;
        if (++batch_count_ == batch_size_) {
            if (warmup_discarded_)
                batch_means_.push_back(batch_sum_ /
                                       static_cast<double>(batch_size_));
            else
                warmup_discarded_ = true;
            batch_sum_ = 0.0;
            batch_count_ = 0;
        }
    }

    const std::vector<double>& batch_means() const { return batch_means_; }
    bool warmup_discarded() const { return warmup_discarded_; }
    long batch_size() const { return batch_size_; }

    // All responses ever recorded, including warm-up and the partial tail.
    double total_sum() const { return total_sum_; }
    long total_count() const { return total_count_; }

private:
    long batch_size_;
    double batch_sum_ = 0.0;
    long batch_count_ = 0;
    std::vector<double> batch_means_;
    bool warmup_discarded_ = false;
    double total_sum_ = 0.0;
    long total_count_ = 0;
};

// Run-length control: stop once enough batches exist and the CI
// half-width is within the relative precision target.
inline bool should_stop(const BatchAccumulator& acc,
                        const PrecisionTarget& target) {
    const auto& means = acc.batch_means();
    if (static_cast<int>(means.size()) < target.min_batches) return false;
    auto [mean, hw] = ci_halfwidth(means, target.confidence);
    return mean > 0.0 && hw <= target.relative_halfwidth * mean;
}

inline double utilization(double busy_time_s, double sim_time_s) {
    if (sim_time_s <= 0.0)
        throw std::invalid_argument("sim time must be positive");
    if (busy_time_s < 0.0 || busy_time_s > sim_time_s)
        throw std::logic_error("busy time outside [0, sim time]");
    return busy_time_s / sim_time_s;
}

}  // namespace lbsim
