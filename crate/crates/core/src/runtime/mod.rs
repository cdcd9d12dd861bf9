//! Safe reimplementations of the backend runtime pieces: the power-of-two
//! freelist allocator, the skiplist-backed codemap, exact double-to-decimal
//! formatting, and the compression codec.

mod codec;
mod codemap;
mod dtoa;
mod freelist;
mod skiplist;

pub use codec::{compress as codec_compress, decompress as codec_decompress, CorruptStream,
    DECODER_MAX_OUTPUT, MAGIC as CODEC_MAGIC, WINDOW_SIZE as CODEC_WINDOW_SIZE};
pub use codemap::{Codemap, CodemapEntry, CodemapError};
pub use dtoa::{format_double_exact, format_double_exact_with, NonFiniteInput};
pub use freelist::{AllocError, BlockId, BlockInfo, FreelistState, DEFAULT_KMAX};
pub use skiplist::{SkipList, SkiplistError};
