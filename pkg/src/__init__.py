# EH Certify Package
