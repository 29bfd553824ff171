use serde::{Deserialize, Serialize};

/// The six feature families, with autoregressive coefficients split out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Statistical,
    Derivative,
    Interval,
    Hjorth,
    Spectral,
    Wavelet,
    Autoregressive,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Statistical,
        Family::Derivative,
        Family::Interval,
        Family::Hjorth,
        Family::Spectral,
        Family::Wavelet,
        Family::Autoregressive,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    /// Machine name, used as CSV column header.
    pub name: String,
    /// Human-readable label used in report tables.
    pub label: String,
    pub family: Family,
    /// Position within the family's extractor output.
    pub slot: usize,
}

const STATISTICAL: [(&str, &str); 7] = [
    ("mean", "Mean"),
    ("median", "Median"),
    ("std", "Standard Deviation"),
    ("skewness", "Skewness"),
    ("kurtosis", "Kurtosis"),
    ("min", "Minimum"),
    ("max", "Maximum"),
];

const DERIVATIVE: [(&str, &str); 4] = [
    ("diff1_max", "1st Difference Max"),
    ("diff1_mean", "1st Difference Mean"),
    ("diff2_max", "2nd Difference Max"),
    ("diff2_mean", "2nd Difference Mean"),
];

const INTERVAL: [(&str, &str); 11] = [
    ("v2v_amplitude_mean", "Mean of Vertex to Vertex Amplitude"),
    ("v2v_amplitude_var", "Variance of Vertex to Vertex Amplitude"),
    ("v2v_slope_mean", "Mean of Vertex to Vertex Slope"),
    ("v2v_slope_var", "Variance of Vertex to Vertex Slope"),
    ("v2v_time_mean", "Mean of Vertex to Vertex Time"),
    ("local_minima", "Number of Local Minima"),
    ("local_maxima", "Number of Local Maxima"),
    ("zero_crossings", "Number of Zero Crossings"),
    ("amplitude_range", "Amplitude Range"),
    ("coeff_of_variation", "Coefficient of Variation"),
    ("line_length", "Line Length"),
];

const HJORTH: [(&str, &str); 3] = [
    ("hjorth_activity", "Hjorth Activity"),
    ("hjorth_mobility", "Hjorth Mobility"),
    ("hjorth_complexity", "Hjorth Complexity"),
];

const SPECTRAL: [(&str, &str); 13] = [
    ("fft_delta_max_power", "FFT Delta Max Power"),
    ("fft_theta_max_power", "FFT Theta Max Power"),
    ("fft_alpha_max_power", "FFT Alpha Max Power"),
    ("fft_beta_max_power", "FFT Beta Max Power"),
    ("fft_delta_mean_power", "FFT Delta Mean Power"),
    ("fft_theta_mean_power", "FFT Theta Mean Power"),
    ("fft_alpha_mean_power", "FFT Alpha Mean Power"),
    ("fft_beta_mean_power", "FFT Beta Mean Power"),
    ("ratio_delta_theta", "Delta/Theta"),
    ("ratio_delta_alpha", "Delta/Alpha"),
    ("ratio_theta_alpha", "Theta/Alpha"),
    ("ratio_beta_alpha", "Beta/Alpha"),
    ("ratio_slow_fast", "(Delta+Theta)/(Alpha+Beta)"),
];

const WAVELET: [(&str, &str); 8] = [
    ("wavelet_approx_mean", "Wavelet Approximate Mean"),
    ("wavelet_approx_std", "Wavelet Approximate Std Deviation"),
    ("wavelet_approx_energy", "Wavelet Approximate Energy"),
    ("wavelet_approx_entropy", "Wavelet Approximate Entropy"),
    ("wavelet_detail_mean", "Wavelet Detailed Mean"),
    ("wavelet_detail_std", "Wavelet Detailed Std Deviation"),
    ("wavelet_detail_energy", "Wavelet Detailed Energy"),
    ("wavelet_detail_entropy", "Wavelet Detailed Entropy"),
];

pub const CANONICAL_AR_ORDER: usize = 6;
pub const CANONICAL_LEN: usize = 52;

/// Ordered feature descriptors. The canonical registry has 52 entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    descriptors: Vec<FeatureDescriptor>,
}

impl FeatureRegistry {
    pub fn canonical() -> Self {
        Self::with_ar_order(CANONICAL_AR_ORDER)
    }

    pub fn with_ar_order(ar_order: usize) -> Self {
        let mut descriptors = Vec::with_capacity(46 + ar_order);
        let mut push = |family, table: &[(&str, &str)]| {
            for (slot, (name, label)) in table.iter().enumerate() {
                descriptors.push(FeatureDescriptor {
                    name: name.to_string(),
                    label: label.to_string(),
                    family,
                    slot,
                });
            }
        };
        push(Family::Statistical, &STATISTICAL);
        push(Family::Derivative, &DERIVATIVE);
        push(Family::Interval, &INTERVAL);
        push(Family::Hjorth, &HJORTH);
        push(Family::Spectral, &SPECTRAL);
        push(Family::Wavelet, &WAVELET);
        for k in 0..ar_order {
            descriptors.push(FeatureDescriptor {
                name: format!("ar_{}", k + 1),
                label: format!("AR Coefficient {}", k + 1),
                family: Family::Autoregressive,
                slot: k,
            });
        }
        Self { descriptors }
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.descriptors
    }

    pub fn names(&self) -> Vec<String> {
        self.descriptors.iter().map(|d| d.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&FeatureDescriptor> {
        self.descriptors.iter().find(|d| d.name == name)
    }

    pub fn family_len(&self, family: Family) -> usize {
        self.descriptors.iter().filter(|d| d.family == family).count()
    }

    /// Display label for a column name; per-channel names resolve through
    /// their `<channel>_` prefix.
    pub fn label_for(&self, column: &str) -> String {
        if let Some(d) = self.get(column) {
            return d.label.clone();
        }
        if let Some((ch, rest)) = column.split_once('_') {
            if let Some(d) = self.get(rest) {
                return format!("{ch} {}", d.label);
            }
        }
        column.to_string()
    }
}

impl Default for FeatureRegistry {
    fn default() -> Self {
        Self::canonical()
    }
}
