# Qubit-reuse transpiler: qubit-saving and SWAP-reducing passes
