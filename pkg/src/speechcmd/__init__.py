"""speechcmd: a desk-scale keyword-spotting toolkit.

WAV ingestion, time-frequency features (log-spectrogram, mel, MFCC),
waveform augmentation, speaker-disjoint dataset management, from-scratch
1D/2D convolutional networks, and softmax-mean ensembling.
"""

from .wav_io import (
    AudioClip,
    MalformedHeader,
    TruncatedData,
    UnsupportedFormat,
    WavError,
    is_silence_candidate,
    parse_wav,
    peak_volume,
    read_wav_file,
    split_into_fragments,
    write_wav,
    write_wav_file,
)
from .dsp import (
    FeatureMap,
    MelFilterbank,
    StftConfig,
    dct_ii,
    dft_direct,
    fft,
    hamming_window,
    hz_to_mel,
    load_scft,
    log_spectrogram,
    mel_filterbank,
    mel_spectrogram,
    mel_to_hz,
    mfcc,
    power_to_db,
    save_scft,
    stft,
)
from .augment import (
    AugmentConfig,
    add_background_noise,
    augment_pipeline,
    change_speed,
    fix_length,
    time_shift,
)
from .dataset import (
    CLASS_NAMES,
    Manifest,
    ManifestEntry,
    assign_folds,
    balanced_batches,
    clean_low_volume,
    load_manifest,
    map_label,
    save_manifest,
    scan_corpus,
    speaker_id,
)
from .nn import (
    DivergedLoss,
    ModelSpec,
    Network,
    build_cnn2d,
    build_network,
    build_resnet1d,
    build_vgg1d,
    softmax_cross_entropy,
)
from .training import Adam, TrainConfig, TrainResult, load_checkpoint, save_checkpoint, train
from .evaluate import (
    Prediction,
    accuracy,
    apply_unknown_threshold,
    confusion_matrix,
    ensemble_mean,
    majority_vote,
    predict,
    predict_batch,
)
from .config import ToolkitConfig, load_config
from .features import FeatureExtractor, feature_map_values, feature_shape, input_length
from .synth import synthesize_corpus

__version__ = "0.1.0"
